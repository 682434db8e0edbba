#pragma once
// Loader for LoCoMo-style conversation files: multi-session dialogues with
// per-turn dia_ids and annotated QA pairs.

#include <string>
#include <vector>

#include "recall/types.hpp"

namespace recall::eval {

struct QARecord {
    std::string question;
    std::string gold_answer;
    int category = 0;  // 1 single-hop .. 5 adversarial
    std::vector<std::string> evidence;  // gold dia_ids; may be empty
    bool missing_evidence_field = false;
};

struct Conversation {
    std::string id;
    std::vector<RawTurn> turns;  // flattened sessions, dia_id preserved as turn_id
    std::vector<QARecord> qa;
};

struct LocomoData {
    std::vector<Conversation> conversations;
    std::vector<std::string> skipped;  // per-record schema violations

    std::size_t total_questions() const {
        std::size_t n = 0;
        for (const auto& c : conversations) n += c.qa.size();
        return n;
    }
};

LocomoData load_locomo(const std::string& path);

}  // namespace recall::eval
