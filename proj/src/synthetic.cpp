#include "thermoreg/synthetic.hpp"

#include "thermoreg/rng.hpp"
#include "thermoreg/schema.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace thermo {
namespace {

// Noise scale per site: tighter for the sites closest to core temperature.
double site_noise(const std::string& output)
{
    if (output == "T_Max_1") return 0.16;
    if (output == "canthi4Max_1") return 0.19;
    if (output == "canthiMax_1") return 0.2;
    if (output.rfind("Max1", 0) == 0) return 0.22;
    if (output.rfind("aveAll", 0) == 0) return 0.26;
    if (output == "T_offset") return 0.5;
    return 0.35;
}

double round_to(double v, double step) { return std::round(v / step) * step; }

} // namespace

RawTable make_synthetic_flir(const SyntheticOptions& opt)
{
    Rng rng(opt.seed);
    const auto& sites = flir_thermal_sites();
    const std::vector<std::string> genders{"Female", "Male"};
    const std::vector<std::string> ages{"18-20", "21-25", "26-30", "31-40", "41-50", "51-60", ">60"};
    const std::vector<std::string> ethnicities{"White", "Asian", "Black or African-American", "Hispanic/Latino",
                                               "Multiracial", "American Indian or Alaskan Native"};

    RawTable t;
    t.n_rows = opt.rows;
    auto add = [&](const std::string& name) -> RawColumn& {
        t.columns.push_back(RawColumn{name, {}});
        t.columns.back().cells.reserve(opt.rows);
        return t.columns.back();
    };
    add("SubjectID");
    for (const auto& site : sites) {
        for (int r = 1; r <= opt.rounds; ++r) {
            add(flir_round_column(site, r));
        }
    }
    for (const char* name : {"Gender", "Age", "Ethnicity", "T_atm", "Humidity", "Distance", "Cosmetics", "Time", "Date",
                             "aveOralF", "aveOralM"}) {
        add(name);
    }
    auto col = [&](std::size_t i) -> std::vector<Cell>& { return t.columns[i].cells; };

    // Fixed per-site calibration: surface = gain * core + offset + ambient term.
    std::vector<double> gain(sites.size());
    std::vector<double> offset(sites.size());
    std::vector<double> ambient(sites.size());
    for (std::size_t s = 0; s < sites.size(); ++s) {
        gain[s] = rng.uniform(0.55, 0.95);
        offset[s] = 35.2 - gain[s] * 37.0 + rng.uniform(-0.6, 0.6);
        ambient[s] = rng.uniform(0.02, 0.12);
    }

    for (std::size_t i = 0; i < opt.rows; ++i) {
        double core = rng.normal(36.95, 0.3);
        if (rng.uniform() < 0.06) {
            core += rng.uniform(0.6, 2.0);
        }
        const bool male = rng.uniform() < 0.4;
        const double t_atm = round_to(rng.uniform(20.0, 29.0), 0.1);
        const double humidity = round_to(rng.uniform(10.0, 70.0), 0.1);
        const double distance = round_to(rng.uniform(0.5, 0.9), 0.01);
        const double subject_bias = rng.normal(0.0, 0.08);

        std::size_t c = 0;
        col(c++).emplace_back(std::to_string(161117 + i / 8) + "-" + std::to_string(i % 8 + 1));
        for (std::size_t s = 0; s < sites.size(); ++s) {
            const double base = gain[s] * core + offset[s] + ambient[s] * (t_atm - 24.0) - 0.3 * (distance - 0.7) +
                                (male ? 0.05 : 0.0) + subject_bias + rng.normal(0.0, site_noise(sites[s].output));
            for (int r = 1; r <= opt.rounds; ++r) {
                const double v = round_to(base + rng.normal(0.0, 0.04), 0.0001);
                if (rng.uniform() < opt.missing_rate * 0.05) {
                    col(c++).emplace_back(Missing{});
                } else {
                    col(c++).emplace_back(v);
                }
            }
        }
        col(c++).emplace_back(genders[male ? 1 : 0]);
        col(c++).emplace_back(ages[rng.uniform_index(ages.size())]);
        col(c++).emplace_back(ethnicities[rng.uniform_index(ethnicities.size())]);
        col(c++).emplace_back(t_atm);
        col(c++).emplace_back(humidity);
        if (rng.uniform() < opt.missing_rate) {
            col(c++).emplace_back(Missing{});
        } else {
            col(c++).emplace_back(distance);
        }
        col(c++).emplace_back(Missing{});
        col(c++).emplace_back(std::to_string(9 + i % 8) + ":" + (i % 2 ? "30" : "05") + ":00");
        col(c++).emplace_back("2018-" + std::to_string(1 + i % 12) + "-" + std::to_string(1 + i % 27));
        col(c++).emplace_back(round_to(core + rng.normal(0.0, 0.1), 0.01));
        if (rng.uniform() < opt.missing_rate * 0.5) {
            col(c++).emplace_back(Missing{});
        } else {
            col(c++).emplace_back(round_to(core + rng.normal(0.0, 0.05), 0.01));
        }
    }
    return t;
}

} // namespace thermo
