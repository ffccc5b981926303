#include "codeshot/tokenizer.hpp"

#include <cctype>

namespace codeshot {

namespace {

std::unordered_set<std::string> lowered(const std::unordered_set<std::string>& words) {
    std::unordered_set<std::string> out;
    for (const auto& w : words) {
        std::string l = w;
        for (auto& c : l) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out.insert(std::move(l));
    }
    // Literal words count as keywords in every language we handle.
    out.insert("true");
    out.insert("false");
    out.insert("none");
    out.insert("null");
    return out;
}

const std::unordered_set<std::string> kPythonReserved = {
    "False", "None", "True", "and", "as", "assert", "async", "await",
    "break", "class", "continue", "def", "del", "elif", "else", "except",
    "finally", "for", "from", "global", "if", "import", "in", "is",
    "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try",
    "while", "with", "yield",
};

const std::unordered_set<std::string> kJavaReserved = {
    "abstract", "assert", "boolean", "break", "byte", "case", "catch",
    "char", "class", "const", "continue", "default", "do", "double",
    "else", "enum", "extends", "final", "finally", "float", "for", "goto",
    "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "package", "private", "protected", "public", "return",
    "short", "static", "strictfp", "super", "switch", "synchronized",
    "this", "throw", "throws", "transient", "try", "void", "volatile",
    "while", "_", "true", "false", "null",
};

const std::unordered_set<std::string> kPythonDropped = lowered(kPythonReserved);
const std::unordered_set<std::string> kJavaDropped = lowered(kJavaReserved);

const std::unordered_set<std::string> kPythonTypes = {
    "int", "float", "str", "bool", "complex", "bytes", "object",
};

const std::unordered_set<std::string> kJavaTypes = {
    "int",     "long",   "short",     "byte",      "char",    "boolean",
    "float",   "double", "void",      "Integer",   "Long",    "Short",
    "Byte",    "Character", "Boolean", "Float",    "Double",  "String",
    "Object",  "Number", "Void",      "BigInteger", "BigDecimal",
};

const std::unordered_set<std::string> kPythonClassIntro = {"class"};

const std::unordered_set<std::string> kJavaClassIntro = {
    "class", "interface", "enum", "new", "extends", "implements",
    "instanceof", "throws",
};

const std::unordered_set<std::string> kPythonImportIntro = {"import", "from"};
const std::unordered_set<std::string> kJavaImportIntro = {"import"};

// Module roots we treat as libraries even without an import line in the
// snippet — inline snippets usually omit their imports.
const std::unordered_set<std::string> kPythonRoots = {
    "os",          "sys",        "re",         "json",        "math",
    "random",      "time",       "datetime",   "collections", "itertools",
    "functools",   "operator",   "subprocess", "shutil",      "glob",
    "pathlib",     "string",     "io",         "csv",         "pickle",
    "urllib",      "requests",   "hashlib",    "struct",      "socket",
    "threading",   "multiprocessing", "logging", "argparse",  "heapq",
    "bisect",      "copy",       "typing",     "base64",      "zlib",
    "gzip",        "tarfile",    "zipfile",    "tempfile",    "traceback",
    "warnings",    "inspect",    "unittest",   "sqlite3",     "configparser",
    "ctypes",      "uuid",       "decimal",    "fractions",   "statistics",
    "array",       "enum",       "dataclasses", "abc",        "contextlib",
    "weakref",     "queue",      "calendar",   "locale",      "http",
    "email",       "xml",        "html",       "numpy",       "np",
    "scipy",       "pandas",     "pd",         "matplotlib",  "plt",
    "seaborn",     "sns",        "sklearn",    "torch",       "tensorflow",
    "tf",          "keras",      "django",     "flask",       "sympy",
    "networkx",    "nx",         "PIL",        "cv2",         "pytest",
};

const std::unordered_set<std::string> kJavaRoots = {
    "java",   "javax",  "jakarta", "org",   "com",     "net",
    "System", "Math",   "Arrays",  "Collections", "Objects", "Files",
    "Paths",  "Thread", "Runtime",
};

} // namespace

const std::unordered_set<std::string>& reserved_words(Language lang) {
    return lang == Language::python ? kPythonReserved : kJavaReserved;
}

const std::unordered_set<std::string>& dropped_words(Language lang) {
    return lang == Language::python ? kPythonDropped : kJavaDropped;
}

const std::unordered_set<std::string>& builtin_type_names(Language lang) {
    return lang == Language::python ? kPythonTypes : kJavaTypes;
}

const std::unordered_set<std::string>& class_intro_words(Language lang) {
    return lang == Language::python ? kPythonClassIntro : kJavaClassIntro;
}

const std::unordered_set<std::string>& import_intro_words(Language lang) {
    return lang == Language::python ? kPythonImportIntro : kJavaImportIntro;
}

const std::unordered_set<std::string>& known_library_roots(Language lang) {
    return lang == Language::python ? kPythonRoots : kJavaRoots;
}

} // namespace codeshot
