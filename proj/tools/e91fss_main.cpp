#include <iostream>
#include <string>
#include <vector>

#include "e91fss/execute.hpp"
#include "e91fss/run_config.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const e91fss::RunConfig cfg = e91fss::parse_config(args);
        return e91fss::execute(cfg);
    } catch (const e91fss::HelpRequested& help) {
        std::cout << help.what();
        return e91fss::kExitOk;
    } catch (const e91fss::UsageError& e) {
        std::cerr << "e91fss: " << e.what() << "\nRun with --help for usage.\n";
        return e91fss::kExitUsage;
    }
}
