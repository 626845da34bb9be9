#include "deeprotect/cli.hpp"

int main(int argc, char** argv) { return deeprotect::run_cli(argc, argv); }
