#include "shdc/cli.hpp"

int main(int argc, char** argv) { return shdc::run_cli(argc, argv); }
