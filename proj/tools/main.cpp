#include "qet/cli.hpp"

int main(int argc, char** argv) { return qet::cli::run(argc, argv); }
