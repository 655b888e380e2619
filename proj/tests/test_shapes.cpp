#include <catch2/catch_amalgamated.hpp>

#include "geoflow/geoflow.hpp"

TEST_CASE("placeholder test_shapes") { REQUIRE(true); }
