#include "specdet/cli.hpp"

int main(int argc, char** argv) { return specdet::run(argc, argv); }
