// Writes a synthetic table in the FLIR raw layout for offline runs.
#include "thermoreg/synthetic.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Generate a synthetic thermography table"};
    thermo::SyntheticOptions opt;
    std::string out = "FLIR_groups1and2.csv";
    app.add_option("-o,--out", out, "Output CSV path");
    app.add_option("--rows", opt.rows, "Number of rows");
    app.add_option("--seed", opt.seed, "Random seed");
    CLI11_PARSE(app, argc, argv);
    std::ofstream f(out, std::ios::binary);
    if (!f) {
        std::cerr << "cannot write " << out << "\n";
        return 2;
    }
    thermo::write_csv(f, thermo::make_synthetic_flir(opt));
    return 0;
}
