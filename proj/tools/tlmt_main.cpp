#include "tlmt/cli.hpp"

int main(int argc, char** argv) { return tlmt::cli::run(argc, argv); }
