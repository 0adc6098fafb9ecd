#pragma once

#include "cdforge/applications.hpp"
#include "cdforge/code.hpp"
#include "cdforge/compose.hpp"
#include "cdforge/construct.hpp"
#include "cdforge/data.hpp"
#include "cdforge/design.hpp"
#include "cdforge/error.hpp"
#include "cdforge/frame.hpp"
#include "cdforge/group.hpp"
#include "cdforge/io.hpp"
#include "cdforge/matrix.hpp"
#include "cdforge/number.hpp"
#include "cdforge/search.hpp"
#include "cdforge/verify.hpp"
