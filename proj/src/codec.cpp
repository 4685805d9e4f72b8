#include <absorb/codec.hpp>

#include <fstream>
#include <sstream>

namespace absorb {

ParseError::ParseError(std::string location, const std::string& message)
    : InputError((location.empty() ? std::string("/") : location) + ": " + message), location_(std::move(location))
{
}

namespace json_util {

const Json& member(const Json& object, const char* key, const std::string& where)
{
    if (!object.is_object())
        throw ParseError(where, "expected an object");
    auto it = object.find(key);
    if (it == object.end())
        throw ParseError(where, std::string("missing key '") + key + "'");
    return *it;
}

int integer(const Json& value, const std::string& where)
{
    if (!value.is_number_integer())
        throw ParseError(where, "expected an integer");
    auto v = value.get<long long>();
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
        throw ParseError(where, "integer out of range");
    return static_cast<int>(v);
}

Element element(const Json& value, int domain_size, const std::string& where)
{
    int e = integer(value, where);
    if (e < 0 || e >= domain_size)
        throw ParseError(where, "element " + std::to_string(e) + " out of range for domain size " +
                                    std::to_string(domain_size));
    return e;
}

Tuple tuple(const Json& value, int domain_size, const std::string& where)
{
    if (!value.is_array())
        throw ParseError(where, "expected an array");
    Tuple t;
    for (std::size_t i = 0; i < value.size(); ++i)
        t.push_back(element(value[i], domain_size, where + "/" + std::to_string(i)));
    return t;
}

} // namespace json_util

using namespace json_util;

Json to_json(const Relation& relation)
{
    Json tuples = Json::array();
    for (const auto& t : relation.tuples())
        tuples.push_back(t);
    return Json{{"arity", relation.arity()}, {"tuples", std::move(tuples)}};
}

Relation relation_from_json(const Json& json, int domain_size, const std::string& where)
{
    int arity = integer(member(json, "arity", where), where + "/arity");
    if (arity < 1)
        throw ParseError(where + "/arity", "arity must be positive");
    const Json& list = member(json, "tuples", where);
    if (!list.is_array())
        throw ParseError(where + "/tuples", "expected an array");
    std::vector<Tuple> tuples;
    for (std::size_t i = 0; i < list.size(); ++i) {
        std::string at = where + "/tuples/" + std::to_string(i);
        Tuple t = tuple(list[i], domain_size, at);
        if (static_cast<int>(t.size()) != arity)
            throw ParseError(at, "arity mismatch: tuple has " + std::to_string(t.size()) + " entries, expected " +
                                     std::to_string(arity));
        tuples.push_back(std::move(t));
    }
    return Relation(arity, std::move(tuples));
}

Json to_json(const RelationalStructure& structure)
{
    Json relations = Json::object();
    for (const auto& [name, rel] : structure.relations())
        relations[name] = to_json(rel);
    return Json{{"size", structure.size()}, {"relations", std::move(relations)}};
}

RelationalStructure structure_from_json(const Json& json)
{
    int size = integer(member(json, "size", ""), "/size");
    if (size < 1)
        throw ParseError("/size", "size must be positive");
    std::map<std::string, Relation> relations;
    const Json& rels = member(json, "relations", "");
    if (!rels.is_object())
        throw ParseError("/relations", "expected an object");
    for (const auto& [name, body] : rels.items()) {
        if (name.empty())
            throw ParseError("/relations", "empty relation name");
        relations.emplace(name, relation_from_json(body, size, "/relations/" + name));
    }
    return RelationalStructure(size, std::move(relations));
}

Json to_json(const Subset& subset)
{
    return Json{{"elements", subset.elements()}};
}

Subset subset_from_json(const Json& json, int domain_size)
{
    return Subset(tuple(member(json, "elements", ""), domain_size, "/elements"));
}

Json to_json(const OperationTable& table)
{
    return Json{{"arity", table.arity()}, {"values", table.values()}};
}

OperationTable table_from_json(const Json& json, int domain_size, const std::string& where)
{
    int arity = integer(member(json, "arity", where), where + "/arity");
    if (arity < 1)
        throw ParseError(where + "/arity", "arity must be at least 1");
    Tuple values = tuple(member(json, "values", where), domain_size, where + "/values");
    std::size_t expected = 1;
    for (int i = 0; i < arity; ++i) {
        expected *= static_cast<std::size_t>(domain_size);
        if (expected > values.size())
            break;
    }
    if (values.size() != expected)
        throw ParseError(where + "/values", "expected size^arity values, got " + std::to_string(values.size()));
    return OperationTable(domain_size, arity, std::move(values));
}

Json to_json(const Digraph& digraph)
{
    Json edges = Json::array();
    for (auto [u, v] : digraph.edges())
        edges.push_back({u, v});
    return Json{{"vertices", digraph.vertex_count()}, {"edges", std::move(edges)}};
}

std::string serialize(const Json& json)
{
    return json.dump();
}

Json parse_json(std::string_view text)
{
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError("", std::string("malformed JSON: ") + e.what());
    }
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write '" + path.string() + "'");
    out << text << '\n';
}

RelationalStructure parse_structure(std::string_view text)
{
    return structure_from_json(parse_json(text));
}

Subset parse_subset(std::string_view text, int domain_size)
{
    return subset_from_json(parse_json(text), domain_size);
}

OperationTable parse_table(std::string_view text, int domain_size)
{
    return table_from_json(parse_json(text), domain_size);
}

} // namespace absorb
