#include "qsg/experiments.hpp"

int main(int argc, char** argv) { return qsg::run_cli(argc, argv); }
