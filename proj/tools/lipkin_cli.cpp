#include "cli_app.hpp"

#include <iostream>

int main(int argc, char** argv) { return lipkin::cli::run_main(argc, argv, std::cout, std::cerr); }
