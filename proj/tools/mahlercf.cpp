// mahlercf: command-line front end. See docs/interface.md for the frozen contract.

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mahlercf/io.hpp"
#include "mahlercf/mahlercf.hpp"

using namespace mahlercf;
using io::json;

namespace {

enum Exit : int { kOk = 0, kFail = 1, kShape = 2, kPrecision = 3, kUsage = 4 };

constexpr std::size_t kDepthCap = 2000;

struct Globals {
    bool no_timestamp = false;
};

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream os;
    os << std::put_time(std::gmtime(&t), "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void emit(json j, const Globals& g) {
    if (!g.no_timestamp) j["generated_at"] = utc_now();
    std::cout << j.dump(2) << '\n';
}

std::pair<std::int64_t, std::int64_t> parse_range(const std::string& s) {
    const auto dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            const auto v = std::stoll(s);
            return {v, v};
        }
        return {std::stoll(s.substr(0, dots)), std::stoll(s.substr(dots + 2))};
    } catch (const std::exception&) {
        throw InvalidParameter("bad range '" + s + "', expected LO..HI");
    }
}

SeriesKind parse_kind(const std::string& s) {
    if (s == "f") return SeriesKind::F;
    if (s == "g") return SeriesKind::G;
    if (s == "h") return SeriesKind::H;
    if (s == "u") return SeriesKind::U;
    throw InvalidParameter("kind must be one of f, g, h, u");
}

// --- cf ----------------------------------------------------------------------

struct CfArgs {
    int d = 2;
    std::size_t n = 10;
    std::string kind = "g";
    std::int64_t floor = 0;
    std::int64_t floor_cap = -(1 << 22);
    std::string format = "text";
};

int run_cf(const CfArgs& a, const Globals& g) {
    if (a.d < 2 || a.n < 1 || a.n > kDepthCap) throw InvalidParameter("need d >= 2 and 1 <= n <= 2000");
    const SeriesKind kind = parse_kind(a.kind);
    const CFExpansion e = expand_family(a.d, kind, a.n, {a.floor, a.floor_cap});
    const MonicCF m = monic_normalize(e);

    std::optional<BetaSequence> betas;
    std::optional<std::size_t> shape_index;
    std::string shape_what;
    if (kind == SeriesKind::G) {
        try {
            betas = extract_betas(a.d, e);
        } catch (const ShapeViolation& ex) {
            shape_index = ex.index();
            shape_what = ex.what();
        }
    }
    std::optional<std::size_t> first_large;
    for (std::size_t i = 1; i < e.partial_quotients.size(); ++i)
        if (e.partial_quotients[i].degree() >= a.d) {
            first_large = i;
            break;
        }

    if (a.format == "json") {
        json j = io::cf(e, betas ? &betas->betas : nullptr);
        json mono = json::array();
        for (const auto& q : m.monic_denominators) mono.push_back(io::poly(q));
        j["monic_denominators"] = mono;
        j["d"] = a.d;
        j["kind"] = to_string(kind);
        if (shape_index) j["shape_violation"] = {{"index", *shape_index}, {"first_large_quotient", first_large ? json(*first_large) : json(nullptr)}};
        emit(j, g);
    } else {
        std::cout << "# " << to_string(kind) << "_" << a.d << ", " << e.size() << " convergents\n";
        for (std::size_t i = 0; i < e.size(); ++i) {
            std::cout << "n=" << i << "  a=" << e.partial_quotients[i].to_string()
                      << "  q^=" << m.monic_denominators[i].to_string();
            if (e.convergents[i].rate) std::cout << "  rate=" << *e.convergents[i].rate;
            if (betas && i >= 2) std::cout << "  beta=" << to_string(betas->betas[i]);
            std::cout << '\n';
        }
    }
    if (shape_index) {
        std::cerr << shape_what;
        if (first_large) std::cerr << "; first partial quotient of degree >= " << a.d << " at index " << *first_large;
        std::cerr << '\n';
        return kShape;
    }
    return kOk;
}

// --- verify ------------------------------------------------------------------

struct VerifyArgs {
    std::string identity;
    int d = 3;
    std::string k = "0..30";
    std::string m = "0..100";
    std::size_t n = 200;
    std::int64_t floor = -200;
};

int run_verify(const VerifyArgs& a, const Globals& g) {
    const auto id = parse_identity(a.identity);
    if (!id) throw InvalidParameter("unknown identity '" + a.identity + "'");
    IdentityReport r;
    switch (*id) {
        case Identity::FunctionalEquation: r = check_functional_equation(a.d, a.floor); break;
        case Identity::Classification: {
            const auto [lo, hi] = parse_range(a.m);
            if (lo < 0 || hi < lo || static_cast<std::size_t>(hi) > kDepthCap) throw InvalidParameter("bad --m range");
            r = check_classification(a.d, lo, hi);
            break;
        }
        case Identity::BinaryRecurrence:
            if (a.n < 4 || a.n > kDepthCap) throw InvalidParameter("--n must be in 4..2000");
            r = check_binary_recurrence(a.n);
            break;
        default: {
            const auto [lo, hi] = parse_range(a.k);
            if (6 * hi + 6 > static_cast<std::int64_t>(kDepthCap)) throw InvalidParameter("--k range exceeds the depth cap");
            r = verify_identity(*id, a.d, lo, hi);
        }
    }
    emit(io::report(r), g);
    return r.passed() ? kOk : kFail;
}

// --- witness -----------------------------------------------------------------

struct WitnessArgs {
    std::string a;
    int d = 2;
    SearchBounds b;
    std::string replay;
};

int run_replay(const std::string& path, const Globals& g) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot read " + path);
    const json j = json::parse(in);
    BadApproxWitness w = io::parse_witness(j);
    w.conditions = revalidate(w);
    json out = io::witness(w);
    out["replay"] = w.conditions.all() && w.conditions.residue == w.residue ? "pass" : "fail";
    emit(out, g);
    return out["replay"] == "pass" ? kOk : kFail;
}

int run_witness(const WitnessArgs& a, const Globals& g) {
    if (!a.replay.empty()) return run_replay(a.replay, g);
    const Integer base = parse_integer(a.a);
    if (base < 2 || (a.d != 2 && a.d != 3)) throw InvalidParameter("need a >= 2 and d in {2, 3}");
    if (a.b.p_bound < 3 || a.b.n0_bound < 1 || a.b.t_bound < 1 || a.b.t_bound > kDepthCap)
        throw InvalidParameter("bounds must be positive (t-bound <= 2000)");
    const DenominatorTable tab = DenominatorTable::build(a.d, a.b.t_bound);
    const SearchResult res = witness_search(base, a.d, a.b, tab);
    if (res.witness) {
        emit(io::witness(*res.witness), g);
        std::cerr << "replay: mahlercf witness --replay <file containing the JSON above>\n";
        return kOk;
    }
    json primes = json::array();
    for (const auto& p : res.primes) primes.push_back({{"p", p.p}, {"stage", to_string(p.stage)}, {"scale_skips", p.scale_skips}});
    emit({{"status", "not-found"}, {"a", io::integer(base)}, {"d", a.d}, {"primes", primes}}, g);
    return kFail;
}

// --- table -------------------------------------------------------------------

struct TableArgs {
    int d = 2;
    std::vector<u64> primes{3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    std::size_t t_bound = 200;
    bool first_only = false;
};

int run_table(const TableArgs& a) {
    if (a.d != 2) throw InvalidParameter("the residue table is defined for d = 2");
    if (a.t_bound < 1 || a.t_bound > kDepthCap) throw InvalidParameter("--t-bound must be in 1..2000");
    const DenominatorTable tab = DenominatorTable::build(a.d, a.t_bound);
    std::vector<TableRow> all;
    for (u64 p : a.primes) {
        auto rows = residue_table(p, a.t_bound, tab);
        if (rows.empty()) {
            std::cerr << "p=" << p << ": none found for t <= " << a.t_bound << '\n';
            continue;
        }
        if (a.first_only) rows.resize(1);
        all.insert(all.end(), rows.begin(), rows.end());
    }
    std::cout << io::table_csv(all);
    return kOk;
}

// --- eval --------------------------------------------------------------------

struct EvalArgs {
    std::string a = "2";
    int d = 2;
    std::string eps = "1/10000000000000000000000000000000000000000";
    std::string kind = "f";
    std::size_t cf_terms = 20;
    unsigned digits = 40;
};

int run_eval(const EvalArgs& a, const Globals& g) {
    const Rational eps = parse_rational(a.eps);
    const CertifiedValue v = eval_mahler(parse_integer(a.a), a.d, eps, parse_kind(a.kind));
    json j = io::certified(v, a.digits);
    json prefix = json::array();
    for (const auto& x : real_cf_prefix(v, a.cf_terms)) prefix.push_back(io::integer(x));
    j["cf_prefix"] = prefix;
    emit(j, g);
    return kOk;
}

// --- demo-hensel -------------------------------------------------------------

struct HenselArgs {
    std::string a;
    int d = 2;
    u64 p = 0;
    std::size_t t = 0;
    std::uint64_t n0 = 0;
    unsigned m = 3;
    std::uint64_t cap = 0;
};

int run_hensel(const HenselArgs& a, const Globals& g) {
    if (a.t < 1 || a.t > kDepthCap) throw InvalidParameter("--t must be in 1..2000");
    const DenominatorTable tab = DenominatorTable::build(a.d, a.t);
    BadApproxWitness w;
    w.a = parse_integer(a.a);
    w.d = a.d;
    w.p = a.p;
    w.n0 = a.n0;
    w.t = a.t;
    w.qt = tab.primitive(a.t);
    w.conditions = revalidate(w);
    w.residue = w.conditions.residue;
    if (!w.conditions.all()) {
        json j = io::witness(w);
        j["status"] = "conditions-fail";
        emit(j, g);
        return kFail;
    }
    try {
        const HenselResult h = hensel_divisibility_demo(w, a.m, a.cap);
        emit({{"a", io::integer(w.a)}, {"d", a.d}, {"p", a.p}, {"t", a.t}, {"m", a.m}, {"n", h.n},
              {"lifted_root", io::integer(h.lifted_root)}, {"modulus", io::integer(h.modulus)}}, g);
        return kOk;
    } catch (const SearchExhausted& e) {
        emit({{"status", "exhausted"}, {"cap", e.cap()}}, g);
        return kFail;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Continued fractions of generalized Thue-Morse series and certificates for their values"};
    app.require_subcommand(1);
    Globals g;
    app.add_flag("--no-timestamp", g.no_timestamp, "omit the generated_at field from JSON output");

    CfArgs cf;
    auto* c_cf = app.add_subcommand("cf", "continued fraction of g_d (or f_d, h_d, u_d)");
    c_cf->add_option("--d", cf.d, "radix d >= 2")->required();
    c_cf->add_option("--n", cf.n, "number of partial quotients after a_0")->required();
    c_cf->add_option("--kind", cf.kind, "series: f, g, h or u")->capture_default_str();
    c_cf->add_option("--floor", cf.floor, "initial precision floor (0 = automatic)");
    c_cf->add_option("--floor-cap", cf.floor_cap, "most negative floor tried before giving up")->capture_default_str();
    c_cf->add_option("--format", cf.format, "text or json")->check(CLI::IsMember({"text", "json"}))->capture_default_str();

    VerifyArgs ver;
    auto* c_ver = app.add_subcommand("verify", "check an identity exactly over a range");
    c_ver->add_option("--identity", ver.identity, "funceq, cube-substitution, beta-product, beta-sum, beta-pair-sum, "
                                                  "coefficient-relations, classification, binary-recurrence")->required();
    c_ver->add_option("--d", ver.d, "radix")->capture_default_str();
    c_ver->add_option("--k", ver.k, "k range LO..HI for beta identities")->capture_default_str();
    c_ver->add_option("--m", ver.m, "convergent range LO..HI for classification")->capture_default_str();
    c_ver->add_option("--n", ver.n, "depth for binary-recurrence")->capture_default_str();
    c_ver->add_option("--floor", ver.floor, "precision floor for funceq")->capture_default_str();

    WitnessArgs wit;
    auto* c_wit = app.add_subcommand("witness", "search for a certificate that f_d(a) is not badly approximable");
    c_wit->add_option("--a", wit.a, "integer a >= 2");
    c_wit->add_option("--d", wit.d, "2 or 3")->capture_default_str();
    c_wit->add_option("--p-min", wit.b.p_min, "smallest prime")->capture_default_str();
    c_wit->add_option("--p-bound", wit.b.p_bound, "largest prime")->capture_default_str();
    c_wit->add_option("--n0-bound", wit.b.n0_bound, "largest n0")->capture_default_str();
    c_wit->add_option("--t-bound", wit.b.t_bound, "largest convergent index")->capture_default_str();
    c_wit->add_option("--replay", wit.replay, "revalidate a witness JSON file");

    TableArgs tab;
    auto* c_tab = app.add_subcommand("table", "roots of q_t mod p^2 as CSV");
    c_tab->add_option("--d", tab.d, "radix (2)")->capture_default_str();
    c_tab->add_option("--p", tab.primes, "primes")->delimiter(',');
    c_tab->add_option("--t-bound", tab.t_bound, "largest convergent index")->capture_default_str();
    c_tab->add_flag("--first-only", tab.first_only, "one row per prime");

    EvalArgs ev;
    auto* c_ev = app.add_subcommand("eval", "certified value of f_d(a) or g_d(a)");
    c_ev->add_option("--a", ev.a, "integer a >= 2")->capture_default_str();
    c_ev->add_option("--d", ev.d, "radix")->capture_default_str();
    c_ev->add_option("--eps", ev.eps, "error bound as num/den");
    c_ev->add_option("--kind", ev.kind, "f or g")->capture_default_str();
    c_ev->add_option("--cf-terms", ev.cf_terms, "maximum certified CF digits")->capture_default_str();
    c_ev->add_option("--digits", ev.digits, "decimal digits")->capture_default_str();

    HenselArgs hen;
    auto* c_hen = app.add_subcommand("demo-hensel", "lift a witness root to p^m and find the matching n");
    c_hen->add_option("--a", hen.a, "integer a")->required();
    c_hen->add_option("--d", hen.d, "2 or 3")->capture_default_str();
    c_hen->add_option("--p", hen.p, "prime")->required();
    c_hen->add_option("--t", hen.t, "convergent index")->required();
    c_hen->add_option("--n0", hen.n0, "witness n0")->required();
    c_hen->add_option("--m", hen.m, "target power of p")->capture_default_str();
    c_hen->add_option("--cap", hen.cap, "search cap (0 = 4 p^(m-1))");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*c_cf) return run_cf(cf, g);
        if (*c_ver) return run_verify(ver, g);
        if (*c_wit) {
            if (wit.a.empty() && wit.replay.empty()) throw InvalidParameter("--a or --replay is required");
            return run_witness(wit, g);
        }
        if (*c_tab) return run_table(tab);
        if (*c_ev) return run_eval(ev, g);
        if (*c_hen) return run_hensel(hen, g);
    } catch (const InsufficientPrecision& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kPrecision;
    } catch (const InvalidParameter& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NotCoprime& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ScaleNotInvertible& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFail;
    }
    return kUsage;
}
