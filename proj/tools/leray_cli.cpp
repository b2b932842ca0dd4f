#include "leray/cli.hpp"

int main(int argc, char** argv) { return leray::run_cli(argc, argv); }
