// Copyright 2026 The revrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REVREC_PORTER_STEMMER_HPP_
#define REVREC_PORTER_STEMMER_HPP_

#include <string>
#include <string_view>

namespace revrec {

/// Porter (1980) suffix-stripping stemmer for lowercase ASCII words.
///
/// Follows Martin Porter's reference C implementation, including its two
/// documented departures from the published algorithm ("bli" -> "ble" and
/// "logi" -> "log" in step 2). Words of one or two letters are returned
/// unchanged. Input must already be lowercase a-z.
class PorterStemmer {
 public:
  std::string operator()(std::string_view word) const {
    State s{std::string(word), 0, 0};
    if (s.b.size() <= 2) return s.b;
    s.k = static_cast<int>(s.b.size()) - 1;
    s.step1ab();
    if (s.k > 0) {
      s.step1c();
      s.step2();
      s.step3();
      s.step4();
      s.step5();
    }
    s.b.resize(static_cast<std::size_t>(s.k) + 1);
    return s.b;
  }

 private:
  // b[0..k] is the current stem; j marks the end of the prefix preceding
  // a matched suffix.
  struct State {
    std::string b;
    int k;
    int j;

    bool cons(int i) const {
      switch (b[i]) {
        case 'a': case 'e': case 'i': case 'o': case 'u':
          return false;
        case 'y':
          return i == 0 ? true : !cons(i - 1);
        default:
          return true;
      }
    }

    // Number of VC sequences in b[0..j].
    int m() const {
      int n = 0;
      int i = 0;
      for (;;) {
        if (i > j) return n;
        if (!cons(i)) break;
        ++i;
      }
      ++i;
      for (;;) {
        for (;;) {
          if (i > j) return n;
          if (cons(i)) break;
          ++i;
        }
        ++i;
        ++n;
        for (;;) {
          if (i > j) return n;
          if (!cons(i)) break;
          ++i;
        }
        ++i;
      }
    }

    bool vowel_in_stem() const {
      for (int i = 0; i <= j; ++i)
        if (!cons(i)) return true;
      return false;
    }

    bool double_cons(int i) const {
      if (i < 1) return false;
      if (b[i] != b[i - 1]) return false;
      return cons(i);
    }

    // consonant-vowel-consonant ending at i, last consonant not w, x or y.
    bool cvc(int i) const {
      if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
      const char ch = b[i];
      return ch != 'w' && ch != 'x' && ch != 'y';
    }

    bool ends(std::string_view s) {
      const int len = static_cast<int>(s.size());
      if (len > k + 1) return false;
      if (std::string_view(b).substr(static_cast<std::size_t>(k - len + 1),
                                     static_cast<std::size_t>(len)) != s)
        return false;
      j = k - len;
      return true;
    }

    void set_to(std::string_view s) {
      b.replace(static_cast<std::size_t>(j + 1), std::string::npos, s);
      k = j + static_cast<int>(s.size());
    }

    void replace_if_measured(std::string_view s) {
      if (m() > 0) set_to(s);
    }

    void step1ab() {
      if (b[k] == 's') {
        if (ends("sses")) {
          k -= 2;
        } else if (ends("ies")) {
          set_to("i");
        } else if (b[k - 1] != 's') {
          --k;
        }
      }
      b.resize(static_cast<std::size_t>(k) + 1);
      if (ends("eed")) {
        if (m() > 0) --k;
      } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
        k = j;
        b.resize(static_cast<std::size_t>(k) + 1);
        if (ends("at")) {
          set_to("ate");
        } else if (ends("bl")) {
          set_to("ble");
        } else if (ends("iz")) {
          set_to("ize");
        } else if (double_cons(k)) {
          --k;
          const char ch = b[k];
          if (ch == 'l' || ch == 's' || ch == 'z') ++k;
        } else if (m() == 1 && cvc(k)) {
          j = k;
          set_to("e");
        }
      }
      b.resize(static_cast<std::size_t>(k) + 1);
    }

    void step1c() {
      if (ends("y") && vowel_in_stem()) b[k] = 'i';
    }

    void step2() {
      switch (b[k - 1]) {
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
      b.resize(static_cast<std::size_t>(k) + 1);
    }

    void step3() {
      switch (b[k]) {
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
      b.resize(static_cast<std::size_t>(k) + 1);
    }

    void step4() {
      switch (b[k - 1]) {
        case 'a':
          if (ends("al")) break;
          return;
        case 'c':
          if (ends("ance")) break;
          if (ends("ence")) break;
          return;
        case 'e':
          if (ends("er")) break;
          return;
        case 'i':
          if (ends("ic")) break;
          return;
        case 'l':
          if (ends("able")) break;
          if (ends("ible")) break;
          return;
        case 'n':
          if (ends("ant")) break;
          if (ends("ement")) break;
          if (ends("ment")) break;
          if (ends("ent")) break;
          return;
        case 'o':
          if (ends("ion") && j >= 0 && (b[j] == 's' || b[j] == 't')) break;
          if (ends("ou")) break;
          return;
        case 's':
          if (ends("ism")) break;
          return;
        case 't':
          if (ends("ate")) break;
          if (ends("iti")) break;
          return;
        case 'u':
          if (ends("ous")) break;
          return;
        case 'v':
          if (ends("ive")) break;
          return;
        case 'z':
          if (ends("ize")) break;
          return;
        default:
          return;
      }
      if (m() > 1) {
        k = j;
        b.resize(static_cast<std::size_t>(k) + 1);
      }
    }

    void step5() {
      j = k;
      if (b[k] == 'e') {
        const int a = m();
        if (a > 1 || (a == 1 && !cvc(k - 1))) --k;
      }
      if (b[k] == 'l' && double_cons(k) && m() > 1) --k;
      b.resize(static_cast<std::size_t>(k) + 1);
    }
  };
};

}  // namespace revrec

#endif  // REVREC_PORTER_STEMMER_HPP_
