#include <iostream>

#include <CLI11.hpp>

#include "cli.hpp"

namespace hecke::cli {

namespace {

void group_flags(CLI::App* c, GroupArgs& g) {
    auto* q = c->add_option("--q", g.q, "Hecke group index q >= 3");
    auto* l = c->add_option("--lambda", g.lambda, "Hecke group parameter lambda");
    q->excludes(l);
    l->excludes(q);
    c->add_option("--rep", g.reps, "RepFile JSON (repeatable; default trivial)")->check(CLI::ExistingFile);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Twisted Selberg zeta functions of Hecke triangle groups", "hecke"};
    app.require_subcommand(1);

    ZetaArgs za;
    auto* zeta = app.add_subcommand("zeta", "Evaluate Z(s, chi) by the Euler product and/or the Fredholm determinant");
    group_flags(zeta, za.g);
    zeta->add_option("--s", za.s, "RE,IM");
    zeta->add_option("--grid", za.grid, "RE0:RE1:N,IM0:IM1:M");
    zeta->add_option("--route", za.route, "euler|fredholm|both");
    zeta->add_option("--order", za.order, "collocation order per domain");
    zeta->add_option("--kmax", za.kmax, "k cutoff of the Euler factors (-1: automatic)");
    zeta->add_option("--norm-cutoff", za.X, "Euler product norm cutoff X");
    zeta->add_option("--out", za.out, "output file or -");
    zeta->add_option("--csv", za.csv, "CSV mirror file");

    ResonanceArgs ra;
    auto* res = app.add_subcommand("resonances", "Locate zeros of Z(s, chi) in a rectangle");
    group_flags(res, ra.g);
    res->add_option("--region", ra.region, "RE0:RE1,IM0:IM1")->required();
    res->add_option("--grid", ra.grid, "NxM sub-boxes");
    res->add_option("--tol", ra.tol, "stability tolerance under order doubling");
    res->add_option("--order", ra.order, "starting collocation order");
    res->add_option("--max-order", ra.max_order, "largest order tried while doubling");
    res->add_flag("--deflate", ra.deflate, "divide out poles of the tail continuation");
    res->add_flag("--strict", ra.strict, "fail when a box has no stable winding count");
    res->add_option("--out", ra.out, "output file or -");
    res->add_option("--csv", ra.csv, "CSV mirror file");

    CheckArgs ca;
    auto* chk = app.add_subcommand("check", "Run a verification suite");
    group_flags(chk, ca.g);
    chk->add_option("--suite", ca.suite, "traces|factorization|theta|billiard|converge|discs")
        ->required()
        ->check(CLI::IsMember({"traces", "factorization", "theta", "billiard", "converge", "discs"}));
    chk->add_option("--order", ca.order, "collocation order (0: suite default)");
    chk->add_option("--out", ca.out, "output file or -");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Exit::ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return Exit::ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return Exit::invalid;
    }

    try {
        if (zeta->parsed()) return cmd_zeta(za, out);
        if (res->parsed()) return cmd_resonances(ra, out);
        if (ca.suite == "converge" && (ca.g.q || ca.g.lambda))
            throw DomainError("the converge suite fixes its own lambda sequence");
        return cmd_check(ca, out);
    } catch (const HeckeError& e) {
        err << "error: " << e.what() << "\n";
        return e.numeric() ? Exit::numeric : Exit::invalid;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return Exit::invalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return Exit::numeric;
    }
}

}  // namespace hecke::cli
