#include "otfs/cli.hpp"

int main(int argc, char** argv) { return otfs::run_cli(argc, argv); }
