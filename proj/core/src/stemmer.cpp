#include "fedsel/stemmer.hpp"

#include <algorithm>

#include "fedsel/error.hpp"

namespace fedsel {
namespace {

// Working state over one word. `end_` is the index of the last character of
// the current stem; `cut_` is the index just before a matched suffix.
class PorterState {
 public:
  explicit PorterState(std::string_view word)
      : buf_(word), end_(static_cast<int>(word.size()) - 1) {}

  std::string run() {
    if (end_ <= 1) return buf_;
    step1ab();
    if (end_ > 0) {
      step1c();
      step2();
      step3();
      step4();
      step5();
    }
    return buf_.substr(0, static_cast<std::size_t>(end_ + 1));
  }

 private:
  bool consonant(int i) const {
    switch (buf_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !consonant(i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in buf_[0..cut_].
  int measure() const {
    int n = 0;
    int i = 0;
    for (;;) {
      if (i > cut_) return n;
      if (!consonant(i)) break;
      ++i;
    }
    ++i;
    for (;;) {
      for (;;) {
        if (i > cut_) return n;
        if (consonant(i)) break;
        ++i;
      }
      ++i;
      ++n;
      for (;;) {
        if (i > cut_) return n;
        if (!consonant(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool vowel_in_stem() const {
    for (int i = 0; i <= cut_; ++i) {
      if (!consonant(i)) return true;
    }
    return false;
  }

  bool double_consonant(int i) const {
    if (i < 1) return false;
    if (buf_[i] != buf_[i - 1]) return false;
    return consonant(i);
  }

  // consonant-vowel-consonant ending at i, last consonant not w, x or y.
  bool cvc(int i) const {
    if (i < 2 || !consonant(i) || consonant(i - 1) || !consonant(i - 2)) {
      return false;
    }
    const char ch = buf_[i];
    return ch != 'w' && ch != 'x' && ch != 'y';
  }

  bool ends(std::string_view suffix) {
    const int len = static_cast<int>(suffix.size());
    if (len > end_ + 1) return false;
    if (buf_.compare(end_ - len + 1, suffix.size(), suffix) != 0) return false;
    cut_ = end_ - len;
    return true;
  }

  void set_to(std::string_view replacement) {
    buf_.replace(cut_ + 1, buf_.size() - (cut_ + 1), replacement);
    end_ = cut_ + static_cast<int>(replacement.size());
    buf_.resize(end_ + 1);
  }

  void replace_if_measured(std::string_view replacement) {
    if (measure() > 0) set_to(replacement);
  }

  void step1ab() {
    if (buf_[end_] == 's') {
      if (ends("sses")) {
        end_ -= 2;
      } else if (ends("ies")) {
        set_to("i");
      } else if (buf_[end_ - 1] != 's') {
        --end_;
      }
      buf_.resize(end_ + 1);
    }
    if (ends("eed")) {
      if (measure() > 0) {
        --end_;
        buf_.resize(end_ + 1);
      }
    } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
      end_ = cut_;
      buf_.resize(end_ + 1);
      if (ends("at")) {
        set_to("ate");
      } else if (ends("bl")) {
        set_to("ble");
      } else if (ends("iz")) {
        set_to("ize");
      } else if (double_consonant(end_)) {
        const char ch = buf_[end_];
        if (ch != 'l' && ch != 's' && ch != 'z') {
          --end_;
          buf_.resize(end_ + 1);
        }
      } else {
        cut_ = end_;
        if (measure() == 1 && cvc(end_)) {
          buf_.push_back('e');
          ++end_;
        }
      }
    }
  }

  void step1c() {
    if (ends("y") && vowel_in_stem()) buf_[end_] = 'i';
  }

  void step2() {
    switch (buf_[end_ - 1]) {
      case 'a':
        if (ends("ational")) { replace_if_measured("ate"); break; }
        if (ends("tional")) { replace_if_measured("tion"); break; }
        break;
      case 'c':
        if (ends("enci")) { replace_if_measured("ence"); break; }
        if (ends("anci")) { replace_if_measured("ance"); break; }
        break;
      case 'e':
        if (ends("izer")) { replace_if_measured("ize"); break; }
        break;
      case 'l':
        // Reference implementation uses "bli" -> "ble" instead of "abli".
        if (ends("bli")) { replace_if_measured("ble"); break; }
        if (ends("alli")) { replace_if_measured("al"); break; }
        if (ends("entli")) { replace_if_measured("ent"); break; }
        if (ends("eli")) { replace_if_measured("e"); break; }
        if (ends("ousli")) { replace_if_measured("ous"); break; }
        break;
      case 'o':
        if (ends("ization")) { replace_if_measured("ize"); break; }
        if (ends("ation")) { replace_if_measured("ate"); break; }
        if (ends("ator")) { replace_if_measured("ate"); break; }
        break;
      case 's':
        if (ends("alism")) { replace_if_measured("al"); break; }
        if (ends("iveness")) { replace_if_measured("ive"); break; }
        if (ends("fulness")) { replace_if_measured("ful"); break; }
        if (ends("ousness")) { replace_if_measured("ous"); break; }
        break;
      case 't':
        if (ends("aliti")) { replace_if_measured("al"); break; }
        if (ends("iviti")) { replace_if_measured("ive"); break; }
        if (ends("biliti")) { replace_if_measured("ble"); break; }
        break;
      case 'g':
        if (ends("logi")) { replace_if_measured("log"); break; }
        break;
      default:
        break;
    }
  }

  void step3() {
    switch (buf_[end_]) {
      case 'e':
        if (ends("icate")) { replace_if_measured("ic"); break; }
        if (ends("ative")) { replace_if_measured(""); break; }
        if (ends("alize")) { replace_if_measured("al"); break; }
        break;
      case 'i':
        if (ends("iciti")) { replace_if_measured("ic"); break; }
        break;
      case 'l':
        if (ends("ical")) { replace_if_measured("ic"); break; }
        if (ends("ful")) { replace_if_measured(""); break; }
        break;
      case 's':
        if (ends("ness")) { replace_if_measured(""); break; }
        break;
      default:
        break;
    }
  }

  void step4() {
    bool matched = false;
    switch (buf_[end_ - 1]) {
      case 'a':
        matched = ends("al");
        break;
      case 'c':
        matched = ends("ance") || ends("ence");
        break;
      case 'e':
        matched = ends("er");
        break;
      case 'i':
        matched = ends("ic");
        break;
      case 'l':
        matched = ends("able") || ends("ible");
        break;
      case 'n':
        matched = ends("ant") || ends("ement") || ends("ment") || ends("ent");
        break;
      case 'o':
        matched = (ends("ion") && cut_ >= 0 &&
                   (buf_[cut_] == 's' || buf_[cut_] == 't')) ||
                  ends("ou");
        break;
      case 's':
        matched = ends("ism");
        break;
      case 't':
        matched = ends("ate") || ends("iti");
        break;
      case 'u':
        matched = ends("ous");
        break;
      case 'v':
        matched = ends("ive");
        break;
      case 'z':
        matched = ends("ize");
        break;
      default:
        break;
    }
    if (matched && measure() > 1) {
      end_ = cut_;
      buf_.resize(end_ + 1);
    }
  }

  void step5() {
    cut_ = end_;
    if (buf_[end_] == 'e') {
      const int m = measure();
      if (m > 1 || (m == 1 && !cvc(end_ - 1))) {
        --end_;
        buf_.resize(end_ + 1);
      }
    }
    if (buf_[end_] == 'l' && double_consonant(end_) && measure() > 1) {
      --end_;
      buf_.resize(end_ + 1);
    }
  }

  std::string buf_;
  int end_;
  int cut_ = 0;
};

}  // namespace

bool is_stemmable(std::string_view word) noexcept {
  return !word.empty() && std::all_of(word.begin(), word.end(), [](char c) {
    return c >= 'a' && c <= 'z';
  });
}

std::string porter_stem(std::string_view word) {
  if (word.empty()) throw Error(ErrorCode::invalid_argument, "cannot stem an empty word");
  if (!is_stemmable(word)) {
    throw Error(ErrorCode::invalid_argument,
                "stemmer input must be lowercase a-z: '" + std::string(word) + "'");
  }
  return PorterState(word).run();
}

}  // namespace fedsel
