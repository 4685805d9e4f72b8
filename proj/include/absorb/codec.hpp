#pragma once

#include <absorb/model.hpp>

#include <json.hpp>

#include <filesystem>
#include <string>
#include <string_view>

namespace absorb {

using Json = nlohmann::json;

/// Parse failure with a JSON-pointer style location ("/relations/leq/tuples/3").
class ParseError : public InputError {
public:
    ParseError(std::string location, const std::string& message);
    const std::string& location() const { return location_; }

private:
    std::string location_;
};

// JSON helpers shared by the codecs of every module.
namespace json_util {

const Json& member(const Json& object, const char* key, const std::string& where);
int integer(const Json& value, const std::string& where);
Element element(const Json& value, int domain_size, const std::string& where);
Tuple tuple(const Json& value, int domain_size, const std::string& where);

} // namespace json_util

Json to_json(const Relation& relation);
Relation relation_from_json(const Json& json, int domain_size, const std::string& where = "");

Json to_json(const RelationalStructure& structure);
RelationalStructure structure_from_json(const Json& json);

Json to_json(const Subset& subset);
Subset subset_from_json(const Json& json, int domain_size);

Json to_json(const OperationTable& table);
OperationTable table_from_json(const Json& json, int domain_size, const std::string& where = "");

Json to_json(const Digraph& digraph);

/// Canonical text: compact, keys sorted.
std::string serialize(const Json& json);

Json parse_json(std::string_view text);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

RelationalStructure parse_structure(std::string_view text);
Subset parse_subset(std::string_view text, int domain_size);
OperationTable parse_table(std::string_view text, int domain_size);

} // namespace absorb
