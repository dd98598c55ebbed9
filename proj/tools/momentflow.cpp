#include "momentflow/cli.hpp"

int main(int argc, char** argv) { return momentflow::run_cli(argc, argv); }
