// rr-reduce: execution-aware WebAssembly program reduction
// Copyright 2026 The rr-reduce Authors.
// SPDX-License-Identifier: Apache-2.0

// Minimal external reducer for hybrid mode: removes functions nothing refers to. The result
// is kept only if the oracle still accepts it; otherwise the input is copied unchanged.

#include "rr/driver/subprocess.hpp"
#include "rr/wasm/binary.hpp"
#include "rr/wasm/transform.hpp"
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"rr-strip: delete unreferenced functions"};
    std::string input;
    std::string output;
    std::string oracle;
    app.add_option("input", input)->required()->check(CLI::ExistingFile);
    app.add_option("output", output)->required();
    app.add_option("oracle", oracle, "oracle executable; exit 0 means interesting");
    CLI11_PARSE(app, argc, argv);

    std::ifstream in{input, std::ios::binary};
    const rr::wasm::bytes original{std::istreambuf_iterator<char>{in}, {}};
    try
    {
        const auto stripped = rr::wasm::encode_module(rr::wasm::remove_unreferenced_functions(rr::wasm::parse_module(original)));
        {
            std::ofstream out{output, std::ios::binary};
            out.write(reinterpret_cast<const char*>(stripped.data()), static_cast<std::streamsize>(stripped.size()));
        }
        if (oracle.empty())
            return 0;
        const auto r = rr::driver::run_process({oracle, output}, std::chrono::seconds{600});
        if (r.exited() && r.exit_code == 0)
            return 0;
    }
    catch (const std::exception& e)
    {
        std::cerr << "rr-strip: " << e.what() << "\n";
    }
    std::filesystem::copy_file(input, output, std::filesystem::copy_options::overwrite_existing);
    return 0;
}
