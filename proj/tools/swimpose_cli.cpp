#include "swimpose/cli.hpp"

int main(int argc, char** argv) { return swimpose::run_cli(argc, argv); }
