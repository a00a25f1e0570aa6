#pragma once

#include "scpau/error.hpp"
#include "scpau/term.hpp"
#include "scpau/signature.hpp"
#include "scpau/theory.hpp"
#include "scpau/normalize.hpp"
#include "scpau/matching.hpp"
#include "scpau/mutate.hpp"
#include "scpau/antiunify.hpp"
#include "scpau/interaction.hpp"
#include "scpau/textio.hpp"
#include "scpau/oracle.hpp"
#include "scpau/generators.hpp"
#include "scpau/bench.hpp"
