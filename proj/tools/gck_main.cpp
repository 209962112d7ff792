#include "gck/cli.hpp"

int main(int argc, char** argv) { return gck::cli_main(argc, argv); }
