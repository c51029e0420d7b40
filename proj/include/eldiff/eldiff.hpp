#pragma once

#include "eldiff/backlund.hpp"
#include "eldiff/core.hpp"
#include "eldiff/corpuscle.hpp"
#include "eldiff/io.hpp"
#include "eldiff/planck.hpp"
#include "eldiff/verify.hpp"
