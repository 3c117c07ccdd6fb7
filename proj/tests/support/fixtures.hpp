// Copyright 2026 The Coda Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Palindrome example used across the suites: the target f1, the reference
// f2 from the other class, and oracle-executable adaptations.

namespace fixtures {

inline constexpr const char* kF1 = R"(int isPalindrome(char str[]) {
  int n = strlen(str);
  int a[100];
  int i;
  for (i = 0; i < n; i++) {
    a[i] = str[n - 1 - i];
  }
  a[n] = 0;
  for (i = 0; i < n / 2; i++) {
    if (a[i] != str[i] || a[n - 1 - i] != str[n - 1 - i])
      return 0;
  }
  return 1;
}
)";

inline constexpr const char* kF2 = R"(int check(char t[]) {
  int len = strlen(t);
  int i = 0;
  while (i < len / 2) {
    if (t[i] != t[len - 1 - i])
      return 0;
    i += 1;
  }
  return 1;
}
)";

// f1 with strlen replaced by an explicit length and the string read from
// the input vector.
inline constexpr const char* kF1Exec = R"(int isPalindrome(char str[], int n) {
  int a[100];
  int i;
  for (i = 0; i < n; i++) {
    a[i] = str[n - 1 - i];
  }
  a[n] = 0;
  for (i = 0; i < n / 2; i++) {
    if (a[i] != str[i] || a[n - 1 - i] != str[n - 1 - i])
      return 0;
  }
  return 1;
}
int main() {
  int s[100];
  int n = read();
  if (n < 0) n = -n;
  n = n % 8;
  int k;
  for (k = 0; k < n; k++) s[k] = read() % 3;
  emit(isPalindrome(s, n));
  return 0;
}
)";

// The same program after for->while and the renames a->t, n->len inside
// isPalindrome.
inline constexpr const char* kF3Exec = R"(int isPalindrome(char str[], int len) {
  int t[100];
  int i;
  i = 0;
  while (i < len) {
    t[i] = str[len - 1 - i];
    i++;
  }
  t[len] = 0;
  i = 0;
  while (i < len / 2) {
    if (t[i] != str[i] || t[len - 1 - i] != str[len - 1 - i])
      return 0;
    i++;
  }
  return 1;
}
int main() {
  int s[100];
  int n = read();
  if (n < 0) n = -n;
  n = n % 8;
  int k;
  for (k = 0; k < n; k++) s[k] = read() % 3;
  emit(isPalindrome(s, n));
  return 0;
}
)";

}  // namespace fixtures
