#pragma once

// Inline grammar texts shared across the unit test files, so the unit test
// binary needs no fixture directory. The first three mirror the shipped
// fixture files.

namespace testg {

inline const char* kThree = R"(start: S
S -> a b b a
S -> a Y a b Z b a
Y -> a a Y b a Z b b
Y -> a Z b
Z -> a b
)";

inline const char* kFour = R"(start: S
S -> a A B b a
A -> a C B b
B -> a a b
B -> a b
C -> a b
)";

inline const char* kAmbig = R"(start: S
S -> a S b
S -> a a S b b
S -> a b
)";

// a^n b^n, n >= 1; unambiguous, already double Greibach.
inline const char* kAnbn = R"(start: S
S -> a S b
S -> a b
)";

// All nonempty binary trees over {a}: heavily ambiguous, epsilon-free,
// unit-free. a^n has Catalan(n-1) derivation trees.
inline const char* kCatalan = R"(start: S
S -> S S
S -> a
)";

}  // namespace testg
