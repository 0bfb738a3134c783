#pragma once

#include "sdtl/ast.hpp"
#include "sdtl/ast_json.hpp"
#include "sdtl/errors.hpp"
#include "sdtl/parser.hpp"
#include "sdtl/record.hpp"
#include "sdtl/kernel.hpp"
#include "sdtl/concrete.hpp"
#include "sdtl/abstract.hpp"
#include "sdtl/serialize.hpp"
#include "sdtl/printer.hpp"
#include "sdtl/soundness.hpp"
#include "sdtl/generator.hpp"
