#pragma once

#include "bytes.hpp"
#include "keccak.hpp"
#include "chain.hpp"
#include "fixture.hpp"
#include "rpc.hpp"
#include "ingest.hpp"
#include "tokens.hpp"
#include "pools.hpp"
#include "amm.hpp"
#include "scenario.hpp"
#include "scenario_gen.hpp"
#include "analytics.hpp"
#include "rugpull.hpp"
#include "names.hpp"
#include "snipers.hpp"
#include "csv.hpp"
#include "pipeline.hpp"
