#include <polyhom/classify.hpp>
#include <polyhom/cli.hpp>
#include <polyhom/galois.hpp>
#include <polyhom/generate.hpp>
#include <polyhom/rel_format.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace polyhom::cli {

using nlohmann::json;

namespace {

struct RunConfig
{
    std::string command;
    std::vector<std::string> inputs;
    std::uint64_t node_budget = SearchLimits{}.node_budget;
    std::uint64_t wall_ms = static_cast<std::uint64_t>(SearchLimits{}.wall_budget.count());
    bool json = false;
    bool timing = true;
    bool serial = false;
    std::size_t k = 1;
    std::size_t m = 1;
    std::size_t max_k = 2;
    std::size_t arity = 3;
    std::size_t cap = 4096;
    std::string family;
    std::string suite;
    std::size_t size = 3;
    bool all = false;
    std::size_t count = 0;
    std::uint64_t seed = 1;
    std::string tuples;
    std::string relation;
    bool verify = false;

    SearchLimits limits() const
    {
        SearchLimits l;
        l.node_budget = node_budget;
        l.wall_budget = std::chrono::milliseconds(wall_ms);
        return l;
    }
    Backend backend() const { return serial ? Backend::Serial : Backend::OpenMP; }
};

class InputError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

json tuples_json(const RelationSet& r)
{
    json out = json::array();
    for (const auto& t : r.tuples())
        out.push_back(t);
    return out;
}

json map_json(const PartialOpMap& f)
{
    json entries = json::array();
    for (const auto& [row, v] : f.entries())
        entries.push_back(json::array({row, v}));
    return {{"arity", f.arity()}, {"carrier", f.carrier()}, {"entries", entries}};
}

PartialOpMap map_from_json(const json& j)
{
    std::vector<PartialOpMap::Entry> entries;
    for (const auto& e : j.at("entries"))
        entries.emplace_back(e.at(0).get<Tuple>(), e.at(1).get<Element>());
    return PartialOpMap(j.at("arity").get<std::size_t>(), j.at("carrier").get<std::size_t>(), std::move(entries));
}

json stats_json(const SearchStats& s, bool timing)
{
    json j{{"nodes", s.nodes}, {"propagations", s.propagations}};
    if (timing)
        j["elapsed_ms"] = std::chrono::duration<double, std::milli>(s.elapsed).count();
    return j;
}

json certificate_json(const PHCertificate& c, bool timing)
{
    json j{{"stage", c.stage}, {"m", c.m}, {"map", map_json(c.map)}, {"b", c.b}};
    j["tau"] = c.tau ? tuples_json(*c.tau) : json(nullptr);
    j["stats"] = stats_json(c.stats, timing);
    return j;
}

json verdict_json(const Verdict& v, bool timing)
{
    const auto& t = v.trace;
    json trace{{"d", t.d},
               {"within_envelope", t.within_envelope},
               {"nu_status", t.nu_status ? json(to_string(*t.nu_status)) : json(nullptr)},
               {"column_sets", t.column_sets},
               {"candidates", t.candidates},
               {"by_projection", t.by_projection},
               {"by_pool", t.by_pool},
               {"by_monotonicity", t.by_monotonicity},
               {"by_search", t.by_search},
               {"refuted", t.refuted},
               {"exhausted", t.exhausted},
               {"stats", stats_json(t.stats, timing)}};
    json j{{"status", to_string(v.status)}, {"trace", trace}};
    j["certificate"] = v.certificate ? certificate_json(*v.certificate, timing) : json(nullptr);
    if (v.status == PHStatus::Inconclusive) {
        j["reason"] = v.reason;
        j["blocking"] = v.blocking ? certificate_json(*v.blocking, timing) : json(nullptr);
    }
    return j;
}

json class_json(const ClassReport& r)
{
    json reasons = json::array();
    for (const auto& x : r.reasons) {
        json item{{"name", x.name}, {"value", x.value}};
        if (!x.detail.empty())
            item["detail"] = x.detail;
        reasons.push_back(item);
    }
    json j{{"family", to_string(r.family)}, {"verdict", to_string(r.verdict)}, {"reasons", reasons}};
    j["witness"] = r.witness ? map_json(*r.witness) : json(nullptr);
    j["witness_tuple"] = r.witness_tuple ? json(*r.witness_tuple) : json(nullptr);
    j["witness_check"] = r.witness_check ? json(to_string(*r.witness_check)) : json(nullptr);
    return j;
}

json homogeneity_json(const HomogeneityResult& r, const PowerHandle& source, bool timing)
{
    json j{{"status", to_string(r.status)}, {"stats", stats_json(r.stats, timing)}};
    if (r.counterexample) {
        const auto& c = *r.counterexample;
        json domain = json::array();
        for (auto x : c.domain)
            domain.push_back(source.decode(x));
        j["counterexample"] = {{"domain", domain}, {"values", c.values}, {"missing", source.decode(c.missing)}};
        j["map"] = map_json(as_partial_op(source, c));
    }
    if (r.recheck)
        j["recheck"] = to_string(*r.recheck);
    return j;
}

std::string tuple_text(std::span<const Element> t)
{
    std::ostringstream s;
    s << "(";
    for (std::size_t i = 0; i < t.size(); ++i)
        s << (i ? "," : "") << t[i];
    s << ")";
    return s.str();
}

std::string map_text(const PartialOpMap& f)
{
    std::ostringstream s;
    s << "{";
    for (std::size_t i = 0; i < f.size(); ++i)
        s << (i ? ", " : "") << tuple_text(f.row(i)) << "->" << f.value(i);
    s << "}";
    return s.str();
}

std::vector<FiniteStructure> load_all(const RunConfig& cfg)
{
    if (cfg.inputs.empty())
        throw InputError("no input files");
    std::vector<FiniteStructure> out;
    for (const auto& path : cfg.inputs) {
        auto v = read_structures(path);
        if (v.empty())
            throw InputError(path + ": no structure");
        out.insert(out.end(), v.begin(), v.end());
    }
    return out;
}

struct Output
{
    json reports = json::array();
    std::ostringstream text;
    bool inconclusive = false;
};

void add_report(Output& o, const FiniteStructure& a, json body, const RunConfig& cfg, Clock::time_point t0)
{
    body["structure"] = a.name();
    body["rel"] = serialize_rel(a);
    if (cfg.timing)
        body["elapsed_ms"] = ms_since(t0);
    o.reports.push_back(std::move(body));
}

// ---------------------------------------------------------------- commands

void cmd_check_hh(const RunConfig& cfg, Output& o, bool k_ary)
{
    for (const auto& a : load_all(cfg)) {
        const auto t0 = Clock::now();
        const std::size_t k = k_ary ? cfg.k : 1;
        auto r = is_k_ph(a, k, cfg.limits());
        const auto source = power(a, k);
        json body = homogeneity_json(r, source, cfg.timing);
        body["k"] = k;
        o.text << a.name() << ": " << to_string(r.status);
        if (r.counterexample)
            o.text << " " << map_text(as_partial_op(source, *r.counterexample)) << " missing "
                   << tuple_text(source.decode(r.counterexample->missing));
        o.text << "\n";
        if (r.status == HomogeneityStatus::Exhausted) {
            o.inconclusive = true;
            body["status"] = "Inconclusive";
        }
        add_report(o, a, std::move(body), cfg, t0);
    }
}

void cmd_decide(const RunConfig& cfg, Output& o)
{
    for (const auto& a : load_all(cfg)) {
        const auto t0 = Clock::now();
        DecideOptions d;
        d.limits = cfg.limits();
        d.backend = cfg.backend();
        auto v = decide_ph(a, d);
        o.text << a.name() << ": " << to_string(v.status);
        if (v.certificate)
            o.text << " (" << v.certificate->stage << " certificate, arity " << v.certificate->map.arity() << ": "
                   << map_text(v.certificate->map) << ")";
        if (v.status == PHStatus::Inconclusive) {
            o.text << ": " << v.reason;
            o.inconclusive = true;
        }
        o.text << "\n";
        add_report(o, a, verdict_json(v, cfg.timing), cfg, t0);
    }
}

void cmd_nu(const RunConfig& cfg, Output& o)
{
    for (const auto& a : load_all(cfg)) {
        const auto t0 = Clock::now();
        auto e = find_nu_polymorphism(a, cfg.arity, cfg.limits());
        json body{{"arity", cfg.arity}, {"status", to_string(e.status)}, {"stats", stats_json(e.stats, cfg.timing)}};
        body["table"] = e.polymorphism ? json(e.polymorphism->table()) : json(nullptr);
        o.text << a.name() << ": " << cfg.arity << "-ary near-unanimity " << to_string(e.status) << "\n";
        if (e.status == SearchStatus::Exhausted)
            o.inconclusive = true;
        add_report(o, a, std::move(body), cfg, t0);
    }
}

void cmd_pol(const RunConfig& cfg, Output& o)
{
    for (const auto& a : load_all(cfg)) {
        const auto t0 = Clock::now();
        auto p = enumerate_polymorphisms(a, cfg.k, cfg.cap, cfg.limits());
        json tables = json::array();
        for (const auto& f : p.functions)
            tables.push_back(f.table());
        json body{{"k", cfg.k},     {"count", p.functions.size()},      {"complete", p.complete},
                  {"capped", p.capped}, {"budget_exhausted", p.budget_exhausted}, {"tables", tables}};
        o.text << a.name() << ": " << p.functions.size() << " polymorphisms of arity " << cfg.k
               << (p.complete ? "" : p.capped ? " (cap reached)" : " (budget exhausted)") << "\n";
        if (p.budget_exhausted)
            o.inconclusive = true;
        add_report(o, a, std::move(body), cfg, t0);
    }
}

void cmd_inv(const RunConfig& cfg, Output& o)
{
    for (const auto& a : load_all(cfg)) {
        const auto t0 = Clock::now();
        std::vector<FunctionTable> fs;
        bool complete = true;
        for (std::size_t k = 1; k <= cfg.max_k; ++k) {
            auto p = enumerate_polymorphisms(a, k, cfg.cap, cfg.limits());
            complete = complete && p.complete;
            if (p.budget_exhausted)
                o.inconclusive = true;
            fs.insert(fs.end(), p.functions.begin(), p.functions.end());
        }
        InvOptions io;
        io.backend = cfg.backend();
        auto fam = invariant_relations(fs, a.size(), cfg.m, io);
        json members = json::array();
        for (const auto& r : fam.members)
            members.push_back(tuples_json(r));
        json body{{"m", cfg.m},
                  {"max_k", cfg.max_k},
                  {"polymorphisms", fs.size()},
                  {"polymorphisms_complete", complete},
                  {"count", fam.members.size()},
                  {"members", members}};
        o.text << a.name() << ": " << fam.members.size() << " relations of arity " << cfg.m
               << " invariant under " << fs.size() << " polymorphisms of arity <= " << cfg.max_k
               << (complete ? "" : " (polymorphism list incomplete)") << "\n";
        add_report(o, a, std::move(body), cfg, t0);
    }
}

void cmd_gamma(const RunConfig& cfg, Output& o)
{
    for (const auto& a : load_all(cfg)) {
        const auto t0 = Clock::now();
        auto tau = read_tuple_file(cfg.tuples, a.size());
        if (tau.empty())
            throw InputError(cfg.tuples + ": no tuples");
        auto g = gamma_closure(a, tau, cfg.limits(), cfg.backend());
        json undecided = json::array();
        for (const auto& t : g.undecided)
            undecided.push_back(t);
        json body{{"tau", tuples_json(tau)},
                  {"complete", g.complete},
                  {"closure", tuples_json(g.closure)},
                  {"undecided", undecided},
                  {"stats", stats_json(g.stats, cfg.timing)}};
        o.text << a.name() << ": gamma closure has " << g.closure.size() << " tuples";
        for (const auto& t : g.closure.tuples())
            o.text << " " << tuple_text(t);
        if (!g.complete) {
            o.text << " (" << g.undecided.size() << " undecided)";
            o.inconclusive = true;
        }
        o.text << "\n";
        add_report(o, a, std::move(body), cfg, t0);
    }
}

void cmd_pp(const RunConfig& cfg, Output& o)
{
    for (const auto& a : load_all(cfg)) {
        const auto t0 = Clock::now();
        auto sigma = read_tuple_file(cfg.relation, a.size());
        auto r = is_pp_definable(a, sigma, cfg.limits());
        json body{{"sigma", tuples_json(sigma)}, {"status", to_string(r.status)}};
        body["witness"] = r.witness ? json(*r.witness) : json(nullptr);
        o.text << a.name() << ": pp-definable " << to_string(r.status);
        if (r.witness)
            o.text << " (witness " << tuple_text(*r.witness) << ")";
        o.text << "\n";
        if (r.status == PpStatus::Inconclusive) {
            o.inconclusive = true;
            json undecided = json::array();
            for (const auto& t : r.undecided)
                undecided.push_back(t);
            body["undecided"] = undecided;
        }
        add_report(o, a, std::move(body), cfg, t0);
    }
}

ClassReport classify_as(Family f, const FiniteStructure& a, const SearchLimits& limits)
{
    switch (f) {
    case Family::Graph: return classify_graph(a, limits);
    case Family::Poset: return classify_poset(a, limits);
    case Family::StrictPoset: return classify_strict_poset(a, limits);
    case Family::EqLattice: return classify_eq_lattice(a, limits);
    }
    throw std::logic_error("unknown family");
}

Family family_of(const std::string& s)
{
    if (s == "strict")
        return Family::StrictPoset;
    auto f = parse_family(s);
    if (!f)
        throw InputError("unknown family '" + s + "'");
    return *f;
}

void cmd_classify(const RunConfig& cfg, Output& o)
{
    const Family f = family_of(cfg.family);
    for (const auto& a : load_all(cfg)) {
        const auto t0 = Clock::now();
        auto r = classify_as(f, a, cfg.limits());
        o.text << a.name() << ": " << to_string(r.verdict);
        for (const auto& x : r.reasons)
            o.text << " " << x.name << "=" << (x.value ? "yes" : "no");
        if (r.witness)
            o.text << " witness " << map_text(*r.witness);
        o.text << "\n";
        add_report(o, a, class_json(r), cfg, t0);
    }
}

void cmd_gen(const RunConfig& cfg, Output& o)
{
    auto fam = parse_gen_family(cfg.family);
    if (!fam)
        throw InputError("unknown family '" + cfg.family + "'");
    if (cfg.all == (cfg.count > 0))
        throw InputError("gen needs exactly one of --all or --count");
    std::vector<FiniteStructure> out;
    if (cfg.all) {
        const std::size_t bound = *fam == GenFamily::Graph ? 5 : *fam == GenFamily::N2Binary ? 2 : 4;
        if (*fam != GenFamily::N2Binary && cfg.size > bound)
            throw InputError("exhaustive " + std::string(to_string(*fam)) + " generation is limited to size " +
                             std::to_string(bound));
        out = all_labeled(*fam, cfg.size);
    } else {
        out = random_labeled(*fam, cfg.size, cfg.count, cfg.seed);
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        o.text << (i ? "\n" : "") << serialize_rel(out[i]);
        o.reports.push_back({{"structure", out[i].name()}, {"rel", serialize_rel(out[i])}});
    }
}

// ---------------------------------------------------------------- crosscheck

struct Row
{
    json body;
    bool agree = true;
    bool inconclusive = false;
};

Row decide_row(const FiniteStructure& a, const SearchLimits& limits, bool timing)
{
    DecideOptions d;
    d.limits = limits;
    d.backend = Backend::Serial;
    auto v = decide_ph(a, d);
    Row r;
    r.body = verdict_json(v, timing);
    r.inconclusive = v.status == PHStatus::Inconclusive;
    if (v.certificate)
        r.agree = verify_certificate(a, *v.certificate, limits);
    return r;
}

Row suite_row(const std::string& suite, const FiniteStructure& a, const RunConfig& cfg)
{
    const auto limits = cfg.limits();
    if (suite == "n2") {
        Row r = decide_row(a, limits, cfg.timing);
        bool all = true;
        json kph = json::array();
        for (std::size_t k = 1; k <= 4; ++k) {
            auto h = is_k_ph(a, k, limits);
            if (h.status == HomogeneityStatus::Exhausted)
                r.inconclusive = true;
            kph.push_back(to_string(h.status));
            all = all && h.status == HomogeneityStatus::Holds;
        }
        r.body["k_ph"] = kph;
        if (!r.inconclusive)
            r.agree = r.agree && (r.body["status"] == "PH") == all;
        return r;
    }
    if (suite == "phhh") {
        Row r;
        json ks = json::array();
        for (std::size_t k = 2; k <= 3; ++k) {
            auto x = is_k_ph(a, k, limits);
            auto y = is_hom_homogeneous(power(a, k), limits);
            if (x.status == HomogeneityStatus::Exhausted || y.status == HomogeneityStatus::Exhausted)
                r.inconclusive = true;
            else
                r.agree = r.agree && (x.status == y.status);
            ks.push_back({{"k", k}, {"k_ph", to_string(x.status)}, {"hh_power", to_string(y.status)}});
        }
        r.body = {{"checks", ks}};
        return r;
    }
    const Family f = suite == "graphs" ? Family::Graph : suite == "posets" ? Family::Poset : Family::StrictPoset;
    Row r = decide_row(a, limits, cfg.timing);
    auto c = classify_as(f, a, limits);
    r.body["classify"] = class_json(c);
    if (c.witness)
        r.agree = r.agree && is_partial_polymorphism(a, *c.witness) &&
                  extendable(a, *c.witness, limits).status == SearchStatus::Unsat;
    if (!r.inconclusive)
        r.agree = r.agree && r.body["status"] == to_string(c.verdict);
    return r;
}

void cmd_kaarli(const RunConfig& cfg, Output& o)
{
    KaarliOptions ko;
    ko.limits = cfg.limits();
    ko.backend = cfg.backend();
    ko.max_k = std::max<std::size_t>(cfg.max_k, 1);
    auto rep = kaarli_cross_check(cfg.size, ko);
    for (const auto& e : rep.entries) {
        json lattice = json::array();
        for (const auto& p : e.lattice)
            lattice.push_back(p);
        json body{{"lattice", lattice}, {"arithmetical", e.arithmetical.ok}, {"checked", e.checked},
                  {"agrees", e.agrees}, {"inconclusive", e.inconclusive}};
        if (e.arithmetical.non_permuting)
            body["non_permuting"] = *e.arithmetical.non_permuting;
        if (e.arithmetical.non_distributive)
            body["non_distributive"] = *e.arithmetical.non_distributive;
        body["decided"] = e.decided ? json(to_string(*e.decided)) : json(nullptr);
        body["refutation_arity"] = e.refutation_arity ? json(*e.refutation_arity) : json(nullptr);
        body["refutation"] = e.refutation ? map_json(*e.refutation) : json(nullptr);
        body["rel"] = serialize_rel(lattice_structure(e.lattice));
        o.reports.push_back(std::move(body));
    }
    o.text << "kaarli n=" << cfg.size << ": " << rep.entries.size() << " lattices, " << rep.agreements
           << " agree, " << rep.disagreements << " disagree, " << rep.inconclusive << " inconclusive, "
           << rep.unchecked << " not searched\n";
    if (rep.inconclusive)
        o.inconclusive = true;
}

void cmd_verify(const RunConfig& cfg, Output& o)
{
    if (cfg.inputs.empty())
        throw InputError("no report files");
    std::size_t verified = 0, failed = 0;
    for (const auto& path : cfg.inputs) {
        std::ifstream in(path);
        if (!in)
            throw InputError(path + ": cannot open");
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::exception& e) {
            throw InputError(path + ": " + e.what());
        }
        if (doc.value("schema_version", 0) != schema_version)
            throw InputError(path + ": unsupported schema version");
        for (const auto& rep : doc.at("reports")) {
            if (!rep.contains("rel"))
                continue;
            std::vector<const json*> maps;
            if (rep.contains("certificate") && !rep["certificate"].is_null())
                maps.push_back(&rep["certificate"]["map"]);
            if (rep.contains("witness") && !rep["witness"].is_null())
                maps.push_back(&rep["witness"]);
            if (rep.contains("classify") && !rep["classify"]["witness"].is_null())
                maps.push_back(&rep["classify"]["witness"]);
            if (rep.contains("refutation") && !rep["refutation"].is_null())
                maps.push_back(&rep["refutation"]);
            if (maps.empty())
                continue;
            auto raw = parse_rel(rep["rel"].get<std::string>());
            if (raw.size() != 1)
                throw InputError(path + ": embedded structure unreadable");
            const auto a = validate_structure(raw[0]);
            for (const json* m : maps) {
                const auto f = map_from_json(*m);
                const bool ok =
                    is_partial_polymorphism(a, f) && extendable(a, f, cfg.limits()).status == SearchStatus::Unsat;
                (ok ? verified : failed)++;
                o.text << a.name() << ": " << (ok ? "verified" : "FAILED") << " " << map_text(f) << "\n";
                o.reports.push_back({{"structure", a.name()}, {"map", *m}, {"verified", ok}});
            }
        }
    }
    o.text << verified << " verified, " << failed << " failed\n";
    if (failed)
        o.inconclusive = true;
}

void cmd_crosscheck(const RunConfig& cfg, Output& o)
{
    if (cfg.verify) {
        cmd_verify(cfg, o);
        return;
    }
    const std::string& s = cfg.suite;
    if (s == "kaarli") {
        if (cfg.size < 1 || cfg.size > 4)
            throw InputError("kaarli suite needs --size between 1 and 4");
        cmd_kaarli(cfg, o);
        return;
    }
    std::vector<FiniteStructure> instances;
    if (s == "n2" || s == "phhh")
        instances = all_labeled(GenFamily::N2Binary, 2);
    else if (s == "graphs")
        instances = all_labeled(GenFamily::Graph, cfg.size);
    else if (s == "posets")
        instances = all_labeled(GenFamily::Poset, cfg.size);
    else if (s == "strict")
        instances = all_labeled(GenFamily::StrictPoset, cfg.size);
    else
        throw InputError("unknown suite '" + s + "' (n2, phhh, graphs, posets, strict, kaarli)");
    if (s != "n2" && s != "phhh" && (cfg.size < 1 || cfg.size > 4))
        throw InputError("suite sizes are limited to 1..4");

    std::vector<Row> rows(instances.size());
    for_each_index(instances.size(), cfg.backend(), [&](std::size_t i) { rows[i] = suite_row(s, instances[i], cfg); });

    std::size_t agree = 0, inconclusive = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& r = rows[i];
        r.body["structure"] = instances[i].name();
        r.body["rel"] = serialize_rel(instances[i]);
        r.body["agree"] = r.agree;
        r.body["inconclusive"] = r.inconclusive;
        inconclusive += r.inconclusive;
        agree += r.agree && !r.inconclusive;
        if (!r.agree)
            o.text << instances[i].name() << ": DISAGREE\n";
        o.reports.push_back(std::move(r.body));
    }
    o.text << "suite " << s << ": " << agree << "/" << rows.size() << " agree, " << inconclusive
           << " inconclusive\n";
    if (inconclusive)
        o.inconclusive = true;
}

std::optional<std::uint64_t> env_number(const char* name)
{
    const char* v = std::getenv(name);
    if (!v || !*v)
        return std::nullopt;
    char* end = nullptr;
    const auto x = std::strtoull(v, &end, 10);
    if (*end != '\0' || x == 0 || v[0] == '-')
        throw InputError(std::string(name) + " must be a positive integer");
    return x;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig cfg;
    try {
        if (auto x = env_number("PHC_NODE_BUDGET"))
            cfg.node_budget = *x;
        if (auto x = env_number("PHC_WALL_MS"))
            cfg.wall_ms = *x;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    CLI::App app{"Polymorphism-homogeneity toolkit for finite relational structures", "polyhom"};
    app.require_subcommand(1);
    auto common = [&](CLI::App* sub, bool inputs) {
        if (inputs)
            sub->add_option("inputs", cfg.inputs, ".rel files")->check(CLI::ExistingFile);
        sub->add_flag("--json", cfg.json, "Print a JSON report");
        sub->add_flag("--no-timing", [&](std::int64_t) { cfg.timing = false; }, "Omit timing fields");
        sub->add_option("--node-budget", cfg.node_budget, "Search node budget")->check(CLI::PositiveNumber);
        sub->add_option("--wall-ms", cfg.wall_ms, "Wall-clock budget in milliseconds")->check(CLI::PositiveNumber);
        sub->add_flag("--serial", cfg.serial, "Use the serial kernels");
    };
    std::map<CLI::App*, std::function<void(const RunConfig&, Output&)>> handlers;

    auto* hh = app.add_subcommand("check-hh", "Homomorphism-homogeneity");
    common(hh, true);
    handlers[hh] = [](const RunConfig& c, Output& o) { cmd_check_hh(c, o, false); };

    auto* kph = app.add_subcommand("check-kph", "k-ary polymorphism-homogeneity");
    common(kph, true);
    kph->add_option("--k", cfg.k, "Arity")->required()->check(CLI::PositiveNumber);
    handlers[kph] = [](const RunConfig& c, Output& o) { cmd_check_hh(c, o, true); };

    auto* dec = app.add_subcommand("decide-ph", "Certified polymorphism-homogeneity decision");
    common(dec, true);
    handlers[dec] = cmd_decide;

    auto* nu = app.add_subcommand("nu", "Near-unanimity polymorphism search");
    common(nu, true);
    nu->add_option("--arity", cfg.arity, "Arity (>= 3)")->required()->check(CLI::Range(3, 64));
    handlers[nu] = cmd_nu;

    auto* pol = app.add_subcommand("pol", "Enumerate polymorphisms");
    common(pol, true);
    pol->add_option("--k", cfg.k, "Arity")->required()->check(CLI::PositiveNumber);
    pol->add_option("--cap", cfg.cap, "Stop after this many")->check(CLI::PositiveNumber);
    handlers[pol] = cmd_pol;

    auto* inv = app.add_subcommand("inv", "Relations invariant under low-arity polymorphisms");
    common(inv, true);
    inv->add_option("--m", cfg.m, "Relation arity")->required()->check(CLI::PositiveNumber);
    inv->add_option("--max-k", cfg.max_k, "Highest polymorphism arity")->check(CLI::PositiveNumber);
    inv->add_option("--cap", cfg.cap, "Polymorphisms per arity")->check(CLI::PositiveNumber);
    handlers[inv] = cmd_inv;

    auto* gamma = app.add_subcommand("gamma", "Closure of a relation under polymorphisms");
    common(gamma, true);
    gamma->add_option("--tuples", cfg.tuples, "Tuple file")->required()->check(CLI::ExistingFile);
    handlers[gamma] = cmd_gamma;

    auto* pp = app.add_subcommand("pp", "Primitive positive definability");
    common(pp, true);
    pp->add_option("--relation", cfg.relation, "Tuple file")->required()->check(CLI::ExistingFile);
    handlers[pp] = cmd_pp;

    auto* cls = app.add_subcommand("classify", "Family classification with witnesses");
    common(cls, true);
    cls->add_option("--family", cfg.family, "graph, poset, strict or eqlattice")
        ->required()
        ->check(CLI::IsMember({"graph", "poset", "strict", "eqlattice"}));
    handlers[cls] = cmd_classify;

    auto* cc = app.add_subcommand("crosscheck", "Batch cross-validation");
    common(cc, true);
    cc->add_option("--suite", cfg.suite, "n2, phhh, graphs, posets, strict or kaarli");
    cc->add_option("--size", cfg.size, "Instance size")->check(CLI::PositiveNumber);
    cc->add_option("--max-k", cfg.max_k, "Highest arity for escalating searches")->check(CLI::PositiveNumber);
    cc->add_flag("--verify-certificates", cfg.verify, "Re-check every map in JSON reports given as inputs");

    handlers[cc] = cmd_crosscheck;

    auto* gen = app.add_subcommand("gen", "Generate structures");
    common(gen, false);
    gen->add_option("--family", cfg.family, "graph, poset, strict or n2-binary")->required();
    gen->add_option("--size", cfg.size, "Carrier size")->check(CLI::PositiveNumber);
    gen->add_flag("--all", cfg.all, "Every labeled instance");
    gen->add_option("--count", cfg.count, "Random instances")->check(CLI::PositiveNumber);
    gen->add_option("--seed", cfg.seed, "Random seed");
    handlers[gen] = cmd_gen;

    std::vector<const char*> argv{"polyhom"};
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return 0;
        }
        err << "error: " << e.what() << "\n";
        return 2;
    }

    CLI::App* chosen = app.get_subcommands().front();
    cfg.command = chosen->get_name();
    if (cfg.command == "crosscheck" && !cfg.verify && cfg.suite.empty()) {
        err << "error: crosscheck needs --suite or --verify-certificates\n";
        return 2;
    }
    Output o;
    try {
        handlers.at(chosen)(cfg, o);
    } catch (const std::runtime_error& e) {
        // parse, validation and family errors
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::logic_error& e) {
        // size limits and malformed arguments
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    if (cfg.json) {
        json doc{{"schema_version", schema_version}, {"command", cfg.command}, {"reports", o.reports}};
        if (cfg.command != "gen") {
            doc["limits"] = {{"node_budget", cfg.node_budget}, {"wall_ms", cfg.wall_ms}};
            doc["backend"] = to_string(cfg.backend());
        }
        out << doc.dump(2) << "\n";
    } else {
        out << o.text.str();
    }
    return o.inconclusive ? 1 : 0;
}

int run(int argc, const char* const* argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace polyhom::cli
