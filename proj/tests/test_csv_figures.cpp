// CSV formatting contract (byte-stable output, metadata before header) and
// the closed-form figure builders.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "vexp/csv.hpp"
#include "vexp/figures.hpp"

using Catch::Approx;
using namespace vexp;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) lines.push_back(line);
    return lines;
}

} // namespace

TEST_CASE("numeric formatting", "[csv]") {
    REQUIRE(fmt_g12(0.0) == "0");
    REQUIRE(fmt_g12(1.0) == "1");
    REQUIRE(fmt_g12(-2.5) == "-2.5");
    REQUIRE(fmt_g12(0.1) == "0.1");
    REQUIRE(fmt_g12(1.0 / 3.0) == "0.333333333333");
    REQUIRE(fmt_g12(1e-12) == "1e-12");
    REQUIRE(fmt_g12(123456789012345.0) == "1.23456789012e+14");
    REQUIRE(fmt_g12(9.6568) == "9.6568");
}

TEST_CASE("CSV writer layout", "[csv]") {
    std::ostringstream os;
    CsvWriter csv(os);
    csv.meta("artifact", "vexp");
    csv.meta("alpha", 0.25);
    csv.meta("d", 3);
    csv.meta("seed", std::uint64_t{20260814});
    const std::vector<std::string> hdr{"x", "y"};
    csv.header(hdr);
    const std::vector<double> r1{1.5, -0.25};
    csv.row(r1);
    const std::vector<std::string> r2{"abc", "0.5"};
    csv.row(r2);

    const auto lines = split_lines(os.str());
    REQUIRE(lines.size() == 7);
    REQUIRE(lines[0] == "# artifact=vexp");
    REQUIRE(lines[1] == "# alpha=0.25");
    REQUIRE(lines[2] == "# d=3");
    REQUIRE(lines[3] == "# seed=20260814");
    REQUIRE(lines[4] == "x,y");
    REQUIRE(lines[5] == "1.5,-0.25");
    REQUIRE(lines[6] == "abc,0.5");
}

TEST_CASE("figure CSV schema", "[figures]") {
    const FigureData fig = figure_fig1();
    std::ostringstream os;
    write_figure_csv(os, fig, 123);
    const auto lines = split_lines(os.str());

    REQUIRE(lines[0] == "# artifact=vexp");
    std::size_t header_at = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].rfind("# ", 0) == 0) {
            // metadata only before the header
            REQUIRE(header_at == 0);
        } else {
            if (header_at == 0) {
                header_at = i;
                REQUIRE(lines[i] == "x,series_id,y");
            }
        }
    }
    REQUIRE(header_at > 0);
    REQUIRE(lines.size() == header_at + 1 + fig.rows.size());

    bool saw_seed = false;
    for (std::size_t i = 0; i < header_at; ++i) saw_seed |= lines[i] == "# seed=123";
    REQUIRE(saw_seed);
}

TEST_CASE("risk-ratio figure values", "[figures]") {
    const FigureData fig = figure_fig1();
    REQUIRE(fig.name == "fig1");

    std::set<std::string> series;
    for (const auto& row : fig.rows) series.insert(row.series);
    REQUIRE(series.size() == 5);
    REQUIRE(series.count("d=2 r=9.6568") == 1);
    REQUIRE(fig.rows.size() == 5 * 39);

    for (const auto& row : fig.rows) REQUIRE(row.y >= 1.0);

    // alpha = 0 values match the direct formula for each catalogued (d, r)
    struct P {
        int d;
        double r;
    };
    const std::vector<P> pairs{{1, 1.0}, {2, 1.0}, {5, 1.0}, {10, 1.0}, {2, 9.6568}};
    for (const auto& p : pairs) {
        const std::string name = "d=" + std::to_string(p.d) + " r=" + fmt_g12(p.r);
        bool found = false;
        for (const auto& row : fig.rows)
            if (row.series == name && std::fabs(row.x) < 1e-12) {
                found = true;
                REQUIRE(row.y ==
                        Approx(risk_ratio_identity(Model{p.d, p.r, 1.0}, AlphaLoss{0.0}))
                            .epsilon(1e-12));
            }
        REQUIRE(found);
    }

    // the (2, 9.6568) series peaks at the catalogued maximum ratio
    for (const auto& row : fig.rows)
        if (row.series == "d=2 r=9.6568" && std::fabs(row.x) < 1e-12)
            REQUIRE(row.y == Approx(1.20710678119).epsilon(1e-9));
}

TEST_CASE("affine dominance figure", "[figures]") {
    const FigureData fig = figure_fig2();
    REQUIRE(fig.rows.size() == 3 * 2 * 51);
    int boundary_rows = 0;
    for (const auto& row : fig.rows) {
        REQUIRE(row.y <= 1.0 + 1e-9); // dominance on the whole grid
        const bool at_cutoff = row.series.size() >= 4 &&
                               row.series.compare(row.series.size() - 4, 4, " c=k") == 0;
        if (at_cutoff && std::fabs(row.x) < 1e-12) {
            REQUIRE(row.y == Approx(1.0).margin(1e-9)); // equality exactly at the cut-off
            ++boundary_rows;
        }
    }
    REQUIRE(boundary_rows == 3);
}

TEST_CASE("truncated dominance figure", "[figures]") {
    const FigureData fig = figure_fig3();
    REQUIRE(fig.rows.size() == 2 * 2 * 2 * 81);
    int boundary_rows = 0;
    for (const auto& row : fig.rows) {
        REQUIRE(row.y <= 1.0 + 1e-9);
        const bool at_cutoff =
            row.series.size() >= 8 &&
            row.series.compare(row.series.size() - 8, 8, " c=kappa") == 0;
        if (at_cutoff && std::fabs(row.x) < 1e-9) {
            REQUIRE(row.y == Approx(1.0).margin(1e-9));
            ++boundary_rows;
        }
    }
    REQUIRE(boundary_rows == 4);
    // the grid is signed: dominance verified on both sides of zero
    REQUIRE(fig.rows.front().x < 0.0);
    REQUIRE(fig.rows.back().x > 0.0);
}

TEST_CASE("unknown figure name", "[figures]") {
    REQUIRE_THROWS_AS(make_figure("fig9", 1), domain_error);
}
