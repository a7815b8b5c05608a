#pragma once

#include "rydfrag/errors.hpp"
#include "rydfrag/spin_config.hpp"
#include "rydfrag/regime.hpp"
#include "rydfrag/basis.hpp"
#include "rydfrag/union_find.hpp"
#include "rydfrag/params.hpp"
#include "rydfrag/constraints.hpp"
#include "rydfrag/templates.hpp"
#include "rydfrag/model.hpp"
#include "rydfrag/linalg.hpp"
#include "rydfrag/spectral.hpp"
#include "rydfrag/dynamics.hpp"
#include "rydfrag/parallel.hpp"
#include "rydfrag/disorder.hpp"
#include "rydfrag/fss.hpp"
#include "rydfrag/fit.hpp"
#include "rydfrag/experiment.hpp"
