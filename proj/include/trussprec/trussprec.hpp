#pragma once

#include "trussprec/analysis.hpp"
#include "trussprec/augment.hpp"
#include "trussprec/decompose.hpp"
#include "trussprec/embedding.hpp"
#include "trussprec/error.hpp"
#include "trussprec/factor.hpp"
#include "trussprec/fretsaw.hpp"
#include "trussprec/generators.hpp"
#include "trussprec/geometry.hpp"
#include "trussprec/graph.hpp"
#include "trussprec/io.hpp"
#include "trussprec/pcg.hpp"
#include "trussprec/pipeline.hpp"
#include "trussprec/rigidity.hpp"
#include "trussprec/stiffness.hpp"
#include "trussprec/tree.hpp"
#include "trussprec/truss.hpp"
