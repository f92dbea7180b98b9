#include "acet/harness.hpp"

int main(int argc, char** argv) { return acet::cli_main(argc, argv); }
