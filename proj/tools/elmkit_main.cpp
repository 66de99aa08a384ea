#include <exception>
#include <iostream>

#include "elmkit/cli_args.hpp"

// Exit codes: 0 success, 1 config error, 2 data error, 3 numeric error.
int main(int argc, char** argv) {
    CLI::App app{"elmkit: extreme learning machines for CTR prediction"};
    elmkit::ArgValues values;
    elmkit::attach_options(app, values);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        return elmkit::run(elmkit::resolve(values), std::cout);
    } catch (const elmkit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const elmkit::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const elmkit::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
