// Single TU for the amalgamated Catch2 runner (provides main).
#include <catch2/catch_amalgamated.cpp>
