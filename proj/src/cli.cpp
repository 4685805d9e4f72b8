#include <absorb/cli.hpp>

#include <absorb/bounds.hpp>
#include <absorb/codec.hpp>
#include <absorb/corpus.hpp>
#include <absorb/decide.hpp>
#include <absorb/engine.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>

namespace absorb {

namespace {

struct Options {
    std::string structure_file;
    std::string subset;
    std::string mode = "absorb";
    std::string certificate_file;
    std::string what;
    int arity = 2;
    int theta = 2;
    int size = 2;
    int max_arity = 2;
    std::string out_dir;
    std::optional<std::size_t> max_vertices;
};

Json payload(const std::string& command)
{
    return Json{{"schema", schema_tag}, {"command", command}};
}

void emit(std::ostream& out, const Json& json)
{
    out << serialize(json) << '\n';
}

RelationalStructure load_structure(const Options& o)
{
    return parse_structure(read_text_file(o.structure_file));
}

Subset load_subset(const Options& o, int domain_size)
{
    const auto first = o.subset.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && o.subset[first] == '{')
        return parse_subset(o.subset, domain_size);
    return parse_subset(read_text_file(o.subset), domain_size);
}

int cmd_decide(const Options& o, const Limits& limits, std::ostream& out, std::ostream& err)
{
    const auto structure = load_structure(o);
    const auto b = load_subset(o, structure.size());
    Decision d = o.mode == "jonsson" ? decide_jonsson(structure, b, limits) : decide_absorption(structure, b, limits);
    Json j = payload("decide");
    j["holds"] = d.holds;
    j["property"] = d.property;
    if (d.failing)
        j["failing"] = to_json(*d.failing);
    if (d.holds && d.certificate && !o.certificate_file.empty()) {
        write_text_file(o.certificate_file, serialize(to_json(*d.certificate)) + "\n");
        j["certificate_file"] = o.certificate_file;
    }
    emit(out, j);
    err << (d.holds ? "B is " : "B is not ") << d.property << '\n';
    return d.holds ? 0 : 1;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err)
{
    const auto structure = load_structure(o);
    const auto b = load_subset(o, structure.size());
    const Certificate cert = certificate_from_json(parse_json(read_text_file(o.certificate_file)), structure.size());
    const Verification v = verify_np_certificate(structure, b, cert);
    Json j = payload("verify");
    j["accepted"] = v.accepted;
    if (!v.accepted)
        j["defect"] = v.defect;
    emit(out, j);
    err << (v.accepted ? "certificate accepted" : "certificate rejected: " + v.defect) << '\n';
    return v.accepted ? 0 : 1;
}

int cmd_search(const Options& o, const Limits& limits, std::ostream& out, std::ostream& err)
{
    const auto structure = load_structure(o);
    const auto b = load_subset(o, structure.size());
    Json j = payload("search");
    j["what"] = o.what;
    bool found = false;
    if (o.what == "term") {
        j["arity"] = o.arity;
        auto term = absorption_term_search(structure, b, o.arity, limits);
        found = term.has_value();
        if (term)
            j["term"] = to_json(*term);
    } else if (o.what == "essential") {
        j["arity"] = o.arity;
        auto witness = essential_witness_search(structure, b, o.arity, limits);
        found = witness.has_value();
        if (witness)
            j["witness"] = Json{{"arity", witness->arity},
                                {"generators", witness->generators},
                                {"relation", to_json(witness->relation)}};
    } else {
        auto chain = oracle_chain_search(structure, b);
        found = chain.has_value();
        if (chain)
            j["chain"] = to_json(*chain);
    }
    j["found"] = found;
    emit(out, j);
    err << o.what << (found ? " found" : " not found") << '\n';
    return found ? 0 : 1;
}

int cmd_bounds(const Options& o, std::ostream& out)
{
    Json j = payload("bounds");
    j.update(to_json(bounds(o.theta, o.size)));
    emit(out, j);
    return 0;
}

int cmd_corpus(const Options& o, const Limits& limits, std::ostream& out, std::ostream& err)
{
    const Corpus corpus = generate_corpus(o.size, o.max_arity, limits);
    const std::filesystem::path dir = o.out_dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw InputError("cannot create directory '" + o.out_dir + "': " + ec.message());
    Json entries = Json::array();
    for (std::size_t i = 0; i < corpus.structures.size(); ++i) {
        const auto& s = corpus.structures[i];
        const std::string name = "structure-" + std::to_string(i) + ".json";
        write_text_file(dir / name, serialize(to_json(s.structure)) + "\n");
        for (const auto& b : s.subuniverses)
            entries.push_back(Json{{"structure", name}, {"b", to_json(b)}});
    }
    Json manifest{{"schema", schema_tag},
                  {"size", corpus.domain_size},
                  {"max_arity", corpus.max_arity},
                  {"relation_choices", corpus.relation_choices},
                  {"structures", corpus.structures.size()},
                  {"instances", corpus.instance_count()},
                  {"entries", entries}};
    write_text_file(dir / "manifest.json", serialize(manifest) + "\n");
    Json j = payload("corpus");
    j["relation_choices"] = corpus.relation_choices;
    j["structures"] = corpus.structures.size();
    j["instances"] = corpus.instance_count();
    j["manifest"] = (dir / "manifest.json").string();
    emit(out, j);
    err << corpus.structures.size() << " structures, " << corpus.instance_count() << " instances\n";
    return 0;
}

void error_payload(std::ostream& out, const std::string& kind, const std::string& message)
{
    Json j{{"schema", schema_tag}, {"error", kind}, {"message", message}};
    emit(out, j);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Decide absorption in finite relational structures", "absorb"};
    app.require_subcommand(1);
    app.add_option("--max-power-vertices", o.max_vertices, "Vertex cap for power structures");

    auto add_instance = [&](CLI::App* sub) {
        sub->add_option("-s,--structure", o.structure_file, "Structure JSON file")->required();
        sub->add_option("-b,--subset", o.subset, "Subset as inline JSON or a file")->required();
    };
    auto* decide = app.add_subcommand("decide", "Decide whether B is absorbing");
    add_instance(decide);
    decide->add_option("--mode", o.mode, "absorb or jonsson")->check(CLI::IsMember({"absorb", "jonsson"}));
    decide->add_option("--certificate", o.certificate_file, "Write the certificate here when B absorbs");

    auto* verify = app.add_subcommand("verify", "Check a certificate");
    add_instance(verify);
    verify->add_option("--certificate", o.certificate_file, "Certificate file")->required();

    auto* search = app.add_subcommand("search", "Search for terms, essential relations or chains");
    add_instance(search);
    search->add_option("--what", o.what, "term, essential or chain")
        ->required()
        ->check(CLI::IsMember({"term", "essential", "chain"}));
    search->add_option("--arity", o.arity, "Arity of the term or relation");

    auto* bounds_cmd = app.add_subcommand("bounds", "Arity bounds for absorption terms");
    bounds_cmd->add_option("--theta", o.theta, "Maximal relation arity")->required();
    bounds_cmd->add_option("--size", o.size, "Domain size")->required();

    auto* corpus = app.add_subcommand("corpus", "Write the enumerated test corpus");
    corpus->add_option("--size", o.size, "Domain size")->required();
    corpus->add_option("--max-arity", o.max_arity, "Largest relation arity")->required();
    corpus->add_option("--out", o.out_dir, "Output directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        error_payload(out, "usage", e.what());
        return 2;
    }

    try {
        Limits limits = Limits::from_environment();
        if (o.max_vertices)
            limits.max_power_vertices = *o.max_vertices;
        if (decide->parsed())
            return cmd_decide(o, limits, out, err);
        if (verify->parsed())
            return cmd_verify(o, out, err);
        if (search->parsed())
            return cmd_search(o, limits, out, err);
        if (bounds_cmd->parsed())
            return cmd_bounds(o, out);
        return cmd_corpus(o, limits, out, err);
    } catch (const CapExceeded& e) {
        err << "resource cap exceeded: " << e.what() << '\n';
        error_payload(out, "cap", e.what());
        return 3;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        error_payload(out, "input", e.what());
        return 2;
    }
}

} // namespace absorb
