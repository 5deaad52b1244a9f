#include "wnet/cli.hpp"

int main(int argc, char** argv) { return wnet::cli::main_entry(argc, argv); }
