#include "cli.hpp"

int main(int argc, char** argv) { return dyson::cli::run(argc, argv); }
