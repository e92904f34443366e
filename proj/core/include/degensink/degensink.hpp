#pragma once

#include "degensink/experiments.hpp"
#include "degensink/io.hpp"
#include "degensink/measures.hpp"
#include "degensink/scalability.hpp"
#include "degensink/sinkhorn.hpp"
#include "degensink/support.hpp"
#include "degensink/types.hpp"
#include "degensink/unbalanced.hpp"
