#pragma once

#include "microrisk/counts.hpp"
#include "microrisk/enumerate.hpp"
#include "microrisk/errors.hpp"
#include "microrisk/io.hpp"
#include "microrisk/model.hpp"
#include "microrisk/report.hpp"
#include "microrisk/risk.hpp"
#include "microrisk/version.hpp"
