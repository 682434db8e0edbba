#include "recall/locomo.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace recall::eval {

using nlohmann::json;

namespace {

std::vector<std::string> flatten_evidence(const json& ev) {
    std::vector<std::string> out;
    if (ev.is_string()) {
        out.push_back(ev.get<std::string>());
    } else if (ev.is_array()) {
        for (const auto& item : ev) {
            auto nested = flatten_evidence(item);
            out.insert(out.end(), nested.begin(), nested.end());
        }
    }
    return out;
}

void parse_conversation(const json& sample, std::size_t index, LocomoData& data) {
    Conversation conv;
    conv.id = sample.value("sample_id", "conv-" + std::to_string(index + 1));

    const json* convo = nullptr;
    if (sample.contains("conversation") && sample["conversation"].is_object())
        convo = &sample["conversation"];
    if (!convo) {
        data.skipped.push_back(conv.id + ": no conversation object");
        return;
    }

    // Sessions are keyed session_1, session_2, ... with sibling
    // session_N_date_time entries.
    std::vector<int> session_numbers;
    for (auto it = convo->begin(); it != convo->end(); ++it) {
        const std::string& key = it.key();
        if (key.rfind("session_", 0) != 0) continue;
        std::string tail = key.substr(8);
        if (tail.empty() || !std::all_of(tail.begin(), tail.end(),
                                         [](unsigned char c) { return std::isdigit(c); }))
            continue;
        if (!it.value().is_array()) continue;
        session_numbers.push_back(std::stoi(tail));
    }
    std::sort(session_numbers.begin(), session_numbers.end());

    for (int n : session_numbers) {
        std::string key = "session_" + std::to_string(n);
        std::string timestamp = convo->value(key + "_date_time", "");
        for (const auto& turn : (*convo)[key]) {
            if (!turn.is_object() || !turn.contains("dia_id") || !turn.contains("text")) {
                data.skipped.push_back(conv.id + "/" + key + ": malformed turn");
                continue;
            }
            RawTurn t;
            t.turn_id = turn["dia_id"].is_string() ? turn["dia_id"].get<std::string>()
                                                   : turn["dia_id"].dump();
            t.speaker = turn.value("speaker", "");
            t.timestamp = timestamp;
            t.text = turn["text"].is_string() ? turn["text"].get<std::string>()
                                              : turn["text"].dump();
            conv.turns.push_back(std::move(t));
        }
    }

    if (sample.contains("qa") && sample["qa"].is_array()) {
        std::size_t qa_index = 0;
        for (const auto& row : sample["qa"]) {
            ++qa_index;
            auto skip = [&](const std::string& why) {
                data.skipped.push_back(conv.id + "/qa#" + std::to_string(qa_index) + ": " + why);
            };
            if (!row.is_object() || !row.contains("question")) {
                skip("missing question");
                continue;
            }
            QARecord rec;
            rec.question = row["question"].get<std::string>();
            if (row.contains("answer")) {
                const auto& a = row["answer"];
                rec.gold_answer = a.is_string() ? a.get<std::string>() : a.dump();
            } else if (row.contains("adversarial_answer")) {
                const auto& a = row["adversarial_answer"];
                rec.gold_answer = a.is_string() ? a.get<std::string>() : a.dump();
            } else {
                skip("missing answer");
                continue;
            }
            if (!row.contains("category") || !row["category"].is_number_integer()) {
                skip("missing category");
                continue;
            }
            rec.category = row["category"].get<int>();
            if (rec.category < 1 || rec.category > 5) {
                skip("category out of range");
                continue;
            }
            if (row.contains("evidence")) {
                rec.evidence = flatten_evidence(row["evidence"]);
            } else {
                rec.missing_evidence_field = true;
            }
            conv.qa.push_back(std::move(rec));
        }
    }

    data.conversations.push_back(std::move(conv));
}

}  // namespace

LocomoData load_locomo(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open conversation file: " + path);
    json doc = json::parse(in, nullptr, false);
    if (doc.is_discarded()) throw std::runtime_error("malformed JSON in " + path);

    LocomoData data;
    if (doc.is_array()) {
        for (std::size_t i = 0; i < doc.size(); ++i) parse_conversation(doc[i], i, data);
    } else if (doc.is_object()) {
        parse_conversation(doc, 0, data);
    } else {
        throw std::runtime_error("conversation file must be a JSON object or array: " + path);
    }
    return data;
}

}  // namespace recall::eval
