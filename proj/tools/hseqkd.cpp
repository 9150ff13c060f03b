// Copyright 2026 The HSE-QKD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// hseqkd: basis tools, analytic rate tables, simulations and networked
// sessions for the HSE key distribution protocol.
//
// Exit codes: 0 success, 1 check failure, 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hse/basis_io.hpp"
#include "hse/bases.hpp"
#include "hse/config.hpp"
#include "hse/error.hpp"
#include "hse/montecarlo.hpp"
#include "hse/rates.hpp"
#include "hse/report.hpp"
#include "hse/session.hpp"
#include "hse/transport.hpp"

namespace {

using namespace hse;

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct SetOptions {
    std::string set = "auto";
    int d = 2;
    int c = 3;
};

void add_set_options(CLI::App* cmd, SetOptions& o) {
    cmd->add_option("--set", o.set,
                    "auto | standard | fourier | qutrit4 | sixstate | prime | file:<path> "
                    "(auto picks a known MU set for --d/--c)")
        ->capture_default_str();
    cmd->add_option("--d", o.d, "dimension")->capture_default_str()->check(CLI::Range(2, 1 << 20));
    cmd->add_option("--c", o.c, "number of bases (letters)")->capture_default_str()->check(CLI::Range(1, 64));
}

bool starts_with(const std::string& s, std::string_view prefix) { return s.rfind(prefix, 0) == 0; }

// Plain list of bases; "standard" is a single basis and cannot form a set.
std::vector<Basisd> resolve_bases(const SetOptions& o, std::string* id) {
    auto from_set = [&](const BasisSetd& s) {
        *id = s.id();
        return std::vector<Basisd>(s.bases().begin(), s.bases().end());
    };
    if (o.set == "standard") {
        *id = "standard:" + std::to_string(o.d);
        return {standard_basis<double>(o.d)};
    }
    if (o.set == "fourier") {
        if (o.c != 2) throw InvalidParameter("--set fourier has exactly 2 bases (use --c 2)");
        return from_set(fourier_pair<double>(o.d));
    }
    if (o.set == "qutrit4") return from_set(qutrit_complete_set<double>());
    if (o.set == "sixstate") return from_set(qubit_six_state_set<double>());
    if (o.set == "prime") return from_set(prime_complete_set<double>(o.d, o.c));
    if (starts_with(o.set, "file:")) return from_set(load_basis_set(o.set.substr(5)));
    if (o.set == "auto") {
        auto s = known_mub_set<double>(o.d, o.c);
        if (!s)
            throw InvalidParameter("no built-in set of " + std::to_string(o.c) + " MU bases in dimension " +
                                   std::to_string(o.d) + "; pass --set file:<path>");
        return from_set(*s);
    }
    throw InvalidParameter("unknown --set '" + o.set + "'");
}

BasisSetd resolve_set(const SetOptions& o) {
    std::string id;
    auto bases = resolve_bases(o, &id);
    if (bases.size() < 2) throw InvalidParameter("the protocol needs at least two bases");
    return BasisSetd(id, std::move(bases));
}

// none | basis:<x> | <x> | breidbart | file:<path> (first basis of the file)
std::optional<Basisd> resolve_eve(const std::string& choice, const std::vector<Basisd>& bases) {
    if (choice == "none") return std::nullopt;
    if (choice == "breidbart") return breidbart_basis<double>();
    if (starts_with(choice, "file:")) return load_basis_set(choice.substr(5))[0].relabeled("eve");
    std::string index = starts_with(choice, "basis:") ? choice.substr(6) : choice;
    std::size_t used = 0;
    int x = -1;
    try {
        x = std::stoi(index, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != index.size() || x < 0 || x >= static_cast<int>(bases.size()))
        throw InvalidParameter("invalid eve '" + choice + "'");
    return bases[static_cast<std::size_t>(x)];
}

void add_format(CLI::App* cmd, std::string& format) {
    cmd->add_option("--format", format, "table | csv | json-lines")
        ->capture_default_str()
        ->check(CLI::IsMember({"table", "csv", "json-lines", "jsonl"}));
}

// ---------------------------------------------------------------- bases

struct BasesArgs {
    SetOptions set{"auto", 3, 4};
    std::string eve = "none";
    double tol = kMutuallyUnbiasedTolerance;
    bool allow_biased = false;
    std::string format = "table";
};

std::string fmt(double v, const char* pattern = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

int bases_verify(const BasesArgs& args) {
    std::string id;
    std::vector<Basisd> bases;
    try {
        bases = resolve_bases(args.set, &id);
    } catch (const ConstructionError& e) {
        std::cout << "FAIL construction: " << e.what() << '\n';
        return kCheckFailed;
    }
    if (!(args.tol > 0)) throw InvalidParameter("--tol must be positive");
    const auto d = bases.front().dim();
    bool ok = true;
    std::cout << "set " << id << "  d=" << d << "  c=" << bases.size() << "  tol=" << fmt(args.tol, "%g") << '\n';
    for (const auto& b : bases) {
        const auto r = verify_orthonormal(b.matrix(), args.tol);
        ok = ok && r.ok;
        std::cout << "  " << b.label() << "  orthonormal " << (r.ok ? "yes" : "NO") << "  max deviation "
                  << fmt(r.max_deviation, "%.3e") << '\n';
    }
    int mu_pairs = 0, pairs = 0;
    for (std::size_t x = 0; x < bases.size(); ++x)
        for (std::size_t y = x + 1; y < bases.size(); ++y) {
            ++pairs;
            const auto t = transition_matrix(bases[x], bases[y]);
            const bool distinct = t.maxCoeff() < 1.0 - kDistinctTolerance;
            const auto mu = is_mutually_unbiased(bases[x], bases[y], args.tol);
            if (mu.ok) ++mu_pairs;
            ok = ok && distinct && (mu.ok || args.allow_biased);
            std::cout << "  " << bases[x].label() << "-" << bases[y].label() << "  distinct "
                      << (distinct ? "yes" : "NO") << "  mutually unbiased " << (mu.ok ? "yes" : "no")
                      << "  max |<i|j>|^2 " << fmt(t.maxCoeff()) << "  max deviation from 1/" << d << " "
                      << fmt(mu.max_dev, "%.3e") << '\n';
        }
    std::cout << mu_pairs << " of " << pairs << " pairs mutually unbiased at 1/" << d << '\n';
    std::cout << (ok ? "PASS" : "FAIL") << '\n';
    return ok ? kOk : kCheckFailed;
}

int bases_distance(const BasesArgs& args) {
    std::string id;
    auto bases = resolve_bases(args.set, &id);
    if (bases.size() < 2 && args.eve == "none") throw InvalidParameter("distance needs two bases or an --eve");
    const auto eve = resolve_eve(args.eve, bases);
    const auto format = parse_output_format(args.format);
    const std::size_t c = bases.size();

    RealMatrix<double> pairwise = RealMatrix<double>::Zero(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c));
    for (std::size_t x = 0; x < c; ++x)
        for (std::size_t y = 0; y < c; ++y)
            if (x != y) pairwise(x, y) = grassmannian_distance(bases[x], bases[y]);
    std::optional<double> average;
    std::vector<double> to_eve;
    if (eve) {
        for (const auto& b : bases) to_eve.push_back(grassmannian_distance(b, *eve));
        average = average_distance(*eve, std::span<const Basisd>(bases));
    }

    if (format == OutputFormat::csv) {
        std::cout << "from,to,distance\n";
        for (std::size_t x = 0; x < c; ++x)
            for (std::size_t y = 0; y < c; ++y)
                std::cout << bases[x].label() << ',' << bases[y].label() << ',' << format_full(pairwise(x, y)) << '\n';
        for (std::size_t x = 0; x < to_eve.size(); ++x)
            std::cout << bases[x].label() << ",eve," << format_full(to_eve[x]) << '\n';
        if (average) std::cout << "average,eve," << format_full(*average) << '\n';
        return kOk;
    }
    if (format == OutputFormat::json_lines) {
        std::ostringstream out;
        out << "{\"set_id\":\"" << id << "\",\"pairwise\":[";
        for (std::size_t x = 0; x < c; ++x) {
            out << (x ? "," : "") << '[';
            for (std::size_t y = 0; y < c; ++y) out << (y ? "," : "") << format_full(pairwise(x, y));
            out << ']';
        }
        out << "],\"to_eve\":";
        if (eve) {
            out << '[';
            for (std::size_t x = 0; x < c; ++x) out << (x ? "," : "") << format_full(to_eve[x]);
            out << "],\"average_to_eve\":" << format_full(*average);
        } else {
            out << "null,\"average_to_eve\":null";
        }
        std::cout << out.str() << "}\n";
        return kOk;
    }
    std::cout << "set " << id << "  squared chordal distance D^2\n" << std::string(12, ' ');
    for (const auto& b : bases) std::printf("%12s", b.label().c_str());
    std::cout << std::flush;
    std::printf("\n");
    for (std::size_t x = 0; x < c; ++x) {
        std::printf("%-12s", bases[x].label().c_str());
        for (std::size_t y = 0; y < c; ++y) std::printf("%12.6f", pairwise(x, y));
        if (eve) std::printf("   to eve %.6f", to_eve[x]);
        std::printf("\n");
    }
    if (average) std::printf("average to eve (%s): %.12g\n", args.eve.c_str(), *average);
    std::fflush(stdout);
    return kOk;
}

int bases_list(const BasesArgs& args) {
    if (args.set.set == "auto" && args.format == "table") {
        std::cout << "built-in sets:\n"
                     "  standard   computational basis of C^d (single basis)\n"
                     "  fourier    standard + Fourier basis, any d, c = 2\n"
                     "  qutrit4    four MU bases of C^3\n"
                     "  sixstate   three MU bases of C^2\n"
                     "  prime      standard + quadratic-phase bases, odd prime d, c <= d + 1\n"
                     "  file:PATH  JSON basis-set document\n";
        return kOk;
    }
    std::string id;
    auto bases = resolve_bases(args.set, &id);
    if (bases.size() >= 2) {
        std::cout << format_basis_set(BasisSetd(id, bases)) << '\n';
        return kOk;
    }
    std::cout << "set " << id << '\n';
    const auto& m = bases.front().matrix();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        std::cout << "  " << bases.front().label() << "[" << j << "] =";
        for (Eigen::Index k = 0; k < m.rows(); ++k)
            std::cout << " (" << fmt(m(k, j).real(), "%.6g") << "," << fmt(m(k, j).imag(), "%.6g") << ")";
        std::cout << '\n';
    }
    return kOk;
}

// ---------------------------------------------------------------- rates

struct RatesArgs {
    std::string protocol = "hse";
    SetOptions set{"", 3, 4};
    std::string eve = "basis:0";
    double fraction = 1.0;
    std::string format = "table";
};

int rates_table1(const RatesArgs& args) {
    std::cout << render_table1(table1(), parse_output_format(args.format));
    return kOk;
}

int rates_compute(RatesArgs args, bool c_given) {
    const auto format = parse_output_format(args.format);
    RateReport report;
    if (args.protocol == "bkb01") {
        report = bkb01_report(args.set.c, args.set.d);
    } else {
        if (args.protocol == "kmb09") {
            if (!c_given) args.set.c = 2;
            if (args.set.c != 2) throw InvalidParameter("kmb09 uses c = 2");
        } else if (args.protocol != "hse") {
            throw InvalidParameter("unknown protocol '" + args.protocol + "'");
        }
        const bool closed_form = args.set.set.empty() && args.eve == "basis:0" && args.fraction == 1.0;
        if (closed_form) {
            report = hse_closed_form_report(args.set.c, args.set.d);
        } else {
            if (args.set.set.empty()) args.set.set = "auto";
            auto set = resolve_set(args.set);
            auto eve = resolve_eve(args.eve, std::vector<Basisd>(set.bases().begin(), set.bases().end()));
            report = hse_report(ProtocolConfig(std::move(set), std::move(eve), args.fraction));
        }
    }
    std::cout << render_rate_report(report, format);
    return kOk;
}

// ---------------------------------------------------------------- sim

struct SimArgs {
    SetOptions set{"auto", 2, 3};
    std::string eve = "basis:0";
    double fraction = 1.0;
    std::uint64_t trials = kDefaultTrials;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    bool bkb01 = false;
    std::string format = "table";
};

ProtocolConfig make_config(const SetOptions& set_options, const std::string& eve_choice, double fraction) {
    auto set = resolve_set(set_options);
    auto eve = resolve_eve(eve_choice, std::vector<Basisd>(set.bases().begin(), set.bases().end()));
    if (eve && eve_choice != "breidbart" && !starts_with(eve_choice, "file:")) eve = eve->relabeled(eve_choice);
    return ProtocolConfig(std::move(set), std::move(eve), fraction);
}

int run_sim(const SimArgs& args) {
    const auto format = parse_output_format(args.format);
    const auto config = make_config(args.set, args.eve, args.fraction);
    SimReport r = args.bkb01 ? simulate_bkb01(config, args.trials, args.seed, args.threads)
                             : estimate_rates(config, args.trials, args.seed, args.threads);
    std::cout << render_sim_reports({r}, format);
    return r.passed() ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------- net

struct NetArgs {
    SetOptions set{"auto", 2, 3};
    std::string role = "bob";
    std::string host = "127.0.0.1";
    std::uint16_t port = kDefaultPort;
    std::string listen = "127.0.0.1:7118";
    std::string forward;
    std::string basis = "basis:0";
    std::string eve_model = "none";
    double fraction = 1.0;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    double disclose = 1.0;
    double connect_timeout = 10.0;
    std::string format = "table";
};

std::pair<std::string, std::uint16_t> split_endpoint(const std::string& s) {
    const auto colon = s.rfind(':');
    std::string host = colon == std::string::npos ? "127.0.0.1" : s.substr(0, colon);
    const std::string port = colon == std::string::npos ? s : s.substr(colon + 1);
    std::size_t used = 0;
    int p = -1;
    try {
        p = std::stoi(port, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != port.size() || p < 0 || p > 65535) throw InvalidParameter("invalid endpoint '" + s + "'");
    if (host.empty()) host = "127.0.0.1";
    return {host, static_cast<std::uint16_t>(p)};
}

int play_role(Transport& transport, const NetArgs& args) {
    if (args.role == "alice") {
        const ProtocolConfig config(resolve_set(args.set));
        AliceOptions options;
        options.disclose_fraction = args.disclose;
        const auto log = run_alice_session(transport, config, args.trials, args.seed, options);
        std::cout << "alice: " << log.trials << " trials, " << log.states_sent << " states sent, " << log.key.size()
                  << " key letters, " << log.disclosed << " letters disclosed\n";
        return kOk;
    }
    // Bob's protocol run does not depend on Eve; the model only sets the
    // analytic values his empirical rates are compared with.
    const auto config = make_config(args.set, args.eve_model, args.fraction);
    const auto log = run_bob_session(transport, config, args.seed);
    const auto outcomes = log.outcomes(config.c());
    SimReport r = summarize(config, tally(outcomes), args.seed);
    r.n_trials = log.records.size();
    std::cout << render_sim_reports({r}, parse_output_format(args.format));
    return r.passed() ? kOk : kCheckFailed;
}

int net_serve(const NetArgs& args) {
    TcpListener listener(args.port, args.host);
    std::cerr << args.role << " listening on " << args.host << ':' << listener.port() << '\n';
    auto transport = listener.accept();
    return play_role(*transport, args);
}

int net_connect(const NetArgs& args) {
    auto transport = tcp_connect(args.host, args.port,
                                 std::chrono::milliseconds(static_cast<long>(args.connect_timeout * 1000)));
    return play_role(*transport, args);
}

int net_eve(const NetArgs& args) {
    if (args.forward.empty()) throw InvalidParameter("--forward is required");
    std::string id;
    const auto bases = resolve_bases(args.set, &id);
    auto basis = resolve_eve(args.basis, bases);
    if (!basis) throw InvalidParameter("eve needs a measurement basis");
    const auto [listen_host, listen_port] = split_endpoint(args.listen);
    const auto [fwd_host, fwd_port] = split_endpoint(args.forward);

    TcpListener listener(listen_port, listen_host);
    std::cerr << "eve listening on " << listen_host << ':' << listener.port() << ", forwarding to " << fwd_host << ':'
              << fwd_port << '\n';
    auto alice_side = listener.accept();
    auto bob_side =
        tcp_connect(fwd_host, fwd_port, std::chrono::milliseconds(static_cast<long>(args.connect_timeout * 1000)));
    EveInterceptor eve(*basis, args.seed, args.fraction);
    const auto log = run_mitm(*alice_side, *bob_side, eve);
    std::cout << "eve: intercepted " << log.entries.size() << " states, relayed " << log.relayed_to_bob
              << " lines to bob and " << log.relayed_to_alice << " to alice\n";
    return kOk;
}

void add_fraction(CLI::App* cmd, double& fraction) {
    cmd->add_option("--intercept-fraction", fraction, "probability that Eve intercepts each state")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
}

void add_net_common(CLI::App* cmd, NetArgs& a) {
    add_set_options(cmd, a.set);
    cmd->add_option("--seed", a.seed, "seed of this endpoint")->capture_default_str();
    cmd->add_option("--connect-timeout", a.connect_timeout, "seconds to keep retrying a refused connection")
        ->capture_default_str();
}

void add_endpoint_role(CLI::App* cmd, NetArgs& a) {
    cmd->add_option("--role", a.role, "alice | bob")->capture_default_str()->check(CLI::IsMember({"alice", "bob"}));
    cmd->add_option("--trials", a.trials, "trials Alice runs")->capture_default_str();
    cmd->add_option("--disclose", a.disclose, "fraction of letters Alice discloses")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--eve-model", a.eve_model,
                    "attack Bob's analytic values assume: none | basis:<x> | breidbart | file:<path>")
        ->capture_default_str();
    add_fraction(cmd, a.fraction);
    add_format(cmd, a.format);
}

int dispatch(int argc, char** argv) {
    CLI::App app{"HSE quantum key distribution toolkit"};
    app.require_subcommand(1);
    int status = kOk;

    BasesArgs bases_args;
    auto* bases = app.add_subcommand("bases", "inspect basis sets");
    bases->require_subcommand(1);
    auto add_bases_flags = [&](CLI::App* cmd) {
        add_set_options(cmd, bases_args.set);
        cmd->add_option("--eve", bases_args.eve, "none | <x> | basis:<x> | breidbart | file:<path>")
            ->capture_default_str();
        cmd->add_option("--tol", bases_args.tol, "verification tolerance")->capture_default_str();
        add_format(cmd, bases_args.format);
    };
    auto* verify = bases->add_subcommand("verify", "check orthonormality and mutual unbiasedness");
    add_bases_flags(verify);
    verify->add_flag("--allow-biased", bases_args.allow_biased, "pass sets whose bases are not mutually unbiased");
    verify->callback([&] { status = bases_verify(bases_args); });
    auto* distance = bases->add_subcommand("distance", "pairwise squared chordal distances");
    add_bases_flags(distance);
    distance->callback([&] { status = bases_distance(bases_args); });
    auto* list = bases->add_subcommand("list", "list built-in sets or print one as JSON");
    add_bases_flags(list);
    list->callback([&] { status = bases_list(bases_args); });

    RatesArgs rates_args;
    auto* rates = app.add_subcommand("rates", "analytic rates");
    rates->require_subcommand(1);
    auto* t1 = rates->add_subcommand("table1", "protocol comparison for d = 2, 3, 7");
    add_format(t1, rates_args.format);
    t1->callback([&] { status = rates_table1(rates_args); });
    auto* compute = rates->add_subcommand("compute", "rates of one configuration");
    compute->add_option("--protocol", rates_args.protocol, "hse | kmb09 | bkb01")
        ->capture_default_str()
        ->check(CLI::IsMember({"hse", "kmb09", "bkb01"}));
    compute->add_option("--set", rates_args.set.set,
                        "evaluate an explicit set by enumeration (auto | fourier | qutrit4 | sixstate | prime | "
                        "file:<path>); closed forms otherwise");
    auto* c_opt = compute->add_option("--c", rates_args.set.c, "number of bases")->capture_default_str();
    compute->add_option("--d", rates_args.set.d, "dimension")->capture_default_str()->check(CLI::Range(2, 1 << 20));
    compute->add_option("--eve", rates_args.eve, "none | basis:<x> | breidbart | file:<path>")->capture_default_str();
    add_fraction(compute, rates_args.fraction);
    add_format(compute, rates_args.format);
    compute->callback([&] { status = rates_compute(rates_args, c_opt->count() > 0); });

    SimArgs sim_args;
    auto* sim = app.add_subcommand("sim", "Monte Carlo simulation against the analytic rates");
    add_set_options(sim, sim_args.set);
    sim->add_option("--eve", sim_args.eve, "none | basis:<x> | breidbart | file:<path>")->capture_default_str();
    sim->add_option("--trials", sim_args.trials, "number of trials")->capture_default_str();
    sim->add_option("--seed", sim_args.seed, "random seed")->capture_default_str();
    sim->add_option("--threads", sim_args.threads, "worker threads (0 = all cores)")->capture_default_str();
    sim->add_flag("--bkb01", sim_args.bkb01, "simulate the basis-announcing protocol on the same bases");
    add_fraction(sim, sim_args.fraction);
    add_format(sim, sim_args.format);
    sim->callback([&] { status = run_sim(sim_args); });

    NetArgs net_args;
    auto* net = app.add_subcommand("net", "run the protocol over TCP");
    net->require_subcommand(1);
    auto* serve = net->add_subcommand("serve", "listen and play one role");
    add_net_common(serve, net_args);
    add_endpoint_role(serve, net_args);
    serve->add_option("--host", net_args.host, "listen address")->capture_default_str();
    serve->add_option("--port", net_args.port, "listen port (0 = ephemeral)")->capture_default_str();
    serve->callback([&] { status = net_serve(net_args); });
    auto* connect = net->add_subcommand("connect", "connect and play one role");
    add_net_common(connect, net_args);
    add_endpoint_role(connect, net_args);
    connect->add_option("--host", net_args.host, "peer address")->capture_default_str();
    connect->add_option("--port", net_args.port, "peer port")->capture_default_str();
    connect->callback([&] { status = net_connect(net_args); });
    auto* eve = net->add_subcommand("eve", "intercept-and-resend relay between Alice and Bob");
    add_net_common(eve, net_args);
    eve->add_option("--listen", net_args.listen, "[host:]port Alice connects to")->capture_default_str();
    eve->add_option("--forward", net_args.forward, "[host:]port of Bob")->required();
    eve->add_option("--basis", net_args.basis, "basis:<x> | breidbart | file:<path>")->capture_default_str();
    add_fraction(eve, net_args.fraction);
    eve->callback([&] { status = net_eve(net_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const InvalidParameter& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kCheckFailed;
    }
}
