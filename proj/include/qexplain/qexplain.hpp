#pragma once

#include "qexplain/atom.hpp"
#include "qexplain/causality.hpp"
#include "qexplain/constraints.hpp"
#include "qexplain/error.hpp"
#include "qexplain/io.hpp"
#include "qexplain/lineage.hpp"
#include "qexplain/model.hpp"
#include "qexplain/parser.hpp"
#include "qexplain/query.hpp"
#include "qexplain/rational.hpp"
#include "qexplain/report.hpp"
#include "qexplain/repairs.hpp"
#include "qexplain/scores.hpp"
#include "qexplain/util.hpp"
