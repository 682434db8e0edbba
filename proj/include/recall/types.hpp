#pragma once
// Core domain types shared across the memory, loop, and eval components.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace recall {

using TupleId = std::uint64_t;

// Verbatim dialogue turn. `text` is stored byte-identical to the ingested
// input; `timestamp` is the session date string as given in the source data.
struct RawTurn {
    std::string turn_id;
    std::string speaker;
    std::string timestamp;
    std::string text;
};

// Atomic (subject, predicate, object, event_time) fact extracted from one
// turn. `event_time` is an ISO-8601 prefix (YYYY, YYYY-MM or YYYY-MM-DD),
// empty when no resolvable time was found.
struct IndexTuple {
    TupleId id = 0;
    std::string subject;
    std::string predicate;
    std::string object;
    std::string event_time;
    std::string source_turn;
    std::vector<double> embedding;

    // Canonical rendering, used both for embedding and for prompt fact lines.
    std::string text() const;
};

enum class EdgeKind { SameSource, Semantic };

struct EdgeLink {
    TupleId from = 0;
    TupleId to = 0;
    EdgeKind kind = EdgeKind::SameSource;
    double weight = 1.0;
};

// Evidence tier. None is the "no flag activated" case sitting below Partial;
// it never terminates the loop and feeds abstention.
enum class Tier { Exact, Inferrable, Partial, None };

const char* tier_name(Tier t);

struct SufficiencyResult {
    Tier tier = Tier::Partial;
    double confidence = 0.0;
    std::string missing;        // empty == evaluator reported "none"
    bool parse_failed = false;  // fail-safe default was substituted
};

// Role of an LLM call, recorded for per-question call accounting.
enum class CallRole { Extract, Sufficiency, Refine, Reason, Answer, Judge };

const char* call_role_name(CallRole r);

struct CallRecord {
    CallRole role;
    double millis = 0.0;
};

}  // namespace recall
