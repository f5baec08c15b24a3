#pragma once

#include "feedback_lens/corpus_io.hpp"
#include "feedback_lens/cue_lexicon.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace test_support {

inline std::filesystem::path source_dir() { return FEEDBACK_LENS_SOURCE_DIR; }
inline std::filesystem::path fixtures() { return source_dir() / "tests" / "fixtures"; }

inline const feedback_lens::CueLexicon& lexicon(feedback_lens::Language lang) {
    static std::map<feedback_lens::Language, feedback_lens::CueLexicon> cache;
    auto it = cache.find(lang);
    if (it == cache.end()) {
        auto path = source_dir() / "data" / "lexicons" / (std::string(feedback_lens::to_string(lang)) + ".json");
        it = cache.emplace(lang, feedback_lens::load_lexicon(path)).first;
    }
    return it->second;
}

inline const feedback_lens::CueLexicon& en() { return lexicon(feedback_lens::Language::en); }

inline feedback_lens::Corpus make_corpus(const std::vector<std::string>& texts,
                                         feedback_lens::Language lang = feedback_lens::Language::en,
                                         const std::string& name = "test") {
    feedback_lens::Corpus c;
    c.manifest.name = name;
    c.manifest.language = lang;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        feedback_lens::Utterance u;
        u.id = name + "-" + std::to_string(i);
        u.dialogue_id = name;
        u.index = i;
        u.text = texts[i];
        c.utterances.push_back(u);
    }
    return c;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("feedback_lens_test_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path write(const std::string& name, const std::string& content) const {
        auto p = path_ / name;
        std::ofstream(p, std::ios::binary) << content;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace test_support
