#pragma once

#include "smartws/model.hpp"
#include "smartws/text.hpp"
#include "smartws/kb.hpp"
#include "smartws/sha256.hpp"
#include "smartws/naming.hpp"
#include "smartws/rules.hpp"
#include "smartws/description.hpp"
#include "smartws/transport.hpp"
#include "smartws/engine.hpp"
#include "smartws/maturity.hpp"
#include "smartws/scenario.hpp"
