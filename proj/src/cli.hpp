#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <hecke/hecke.hpp>

namespace hecke::cli {

enum Exit { ok = 0, failed = 1, invalid = 2, numeric = 3 };

// Group and representation flags shared by every command.
struct GroupArgs {
    std::optional<int> q;
    std::optional<double> lambda;
    std::vector<std::string> reps;

    HeckeGroup group() const;
    UnitaryRep rep(const HeckeGroup& G, size_t i = 0) const;
};

UnitaryRep parse_rep(const HeckeGroup& G, const nlohmann::json& doc);
UnitaryRep load_rep(const HeckeGroup& G, const std::string& path);
nlohmann::json rep_to_json(const UnitaryRep& chi);

struct ZetaArgs {
    GroupArgs g;
    std::string s = "2,0", grid, route = "fredholm", out = "-", csv;
    int order = 32, kmax = -1;
    double X = 1e6;
};

struct ResonanceArgs {
    GroupArgs g;
    std::string region, grid = "2x2", out = "-", csv;
    double tol = 1e-8;
    int order = 32, max_order = 256;
    bool strict = false, deflate = false;
};

struct CheckArgs {
    GroupArgs g;
    std::string suite, out = "-";
    int order = 0;
};

int cmd_zeta(const ZetaArgs& a, std::ostream& out);
int cmd_resonances(const ResonanceArgs& a, std::ostream& out);
int cmd_check(const CheckArgs& a, std::ostream& out);

// Parses argv, runs the command and maps errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hecke::cli
