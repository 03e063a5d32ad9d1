#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace segcor {

// Base class for every error the toolkit raises on bad input or misuse.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Label files and phone sets
// ---------------------------------------------------------------------------

class MalformedLine : public Error {
public:
  MalformedLine(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_no(line) {}
  int line_no;
};

class NonContiguous : public Error {
public:
  explicit NonContiguous(int line)
      : Error("line " + std::to_string(line) +
              ": segment does not start where the previous one ends"),
        line_no(line) {}
  int line_no;
};

class UnknownPhone : public Error {
public:
  UnknownPhone(const std::string& sym, int line)
      : Error("line " + std::to_string(line) + ": unknown phone symbol '" + sym + "'"),
        symbol(sym), line_no(line) {}
  std::string symbol;
  int line_no;
};

class EmptyFile : public Error {
public:
  EmptyFile() : Error("file contains no records") {}
};

class DuplicateSymbol : public Error {
public:
  explicit DuplicateSymbol(const std::string& sym)
      : Error("duplicate phone symbol '" + sym + "'"), symbol(sym) {}
  std::string symbol;
};

class UnknownClass : public Error {
public:
  explicit UnknownClass(const std::string& cls)
      : Error("unknown phone class '" + cls + "'"), cls(cls) {}
  std::string cls;
};

class NoSilenceSymbol : public Error {
public:
  NoSilenceSymbol() : Error("phone set declares no silence symbol") {}
};

class InvalidAlignment : public Error {
public:
  explicit InvalidAlignment(const std::string& what) : Error(what) {}
};

// ---------------------------------------------------------------------------
// Alignment comparison
// ---------------------------------------------------------------------------

class UtteranceMismatch : public Error {
public:
  UtteranceMismatch(const std::string& ref_id, const std::string& hyp_id)
      : Error("utterance ids differ: '" + ref_id + "' vs '" + hyp_id + "'") {}
};

// ---------------------------------------------------------------------------
// Utterance structures and feature schemas
// ---------------------------------------------------------------------------

class EmptySyllable : public Error {
public:
  EmptySyllable() : Error("syllable has no phones") {}
};

class StructureParseError : public Error {
public:
  explicit StructureParseError(const std::string& what) : Error(what) {}
};

class PhoneNotInPhoneSet : public Error {
public:
  explicit PhoneNotInPhoneSet(const std::string& sym)
      : Error("structure phone '" + sym + "' is not in the phone set"), symbol(sym) {}
  std::string symbol;
};

class StructureAlignmentMismatch : public Error {
public:
  explicit StructureAlignmentMismatch(const std::string& what) : Error(what) {}
};

class IndexOutOfRange : public Error {
public:
  IndexOutOfRange(std::size_t index, std::size_t count)
      : Error("phone index " + std::to_string(index) + " out of range (count " +
              std::to_string(count) + ")") {}
};

class SchemaError : public Error {
public:
  explicit SchemaError(const std::string& what) : Error(what) {}
};

// ---------------------------------------------------------------------------
// Regression trees
// ---------------------------------------------------------------------------

class EmptyExamples : public Error {
public:
  EmptyExamples() : Error("no training examples") {}
};

class SchemaMismatch : public Error {
public:
  SchemaMismatch(const std::string& expected, const std::string& got)
      : Error("feature schema hash mismatch: expected " + expected + ", got " + got) {}
};

class TreeParseError : public Error {
public:
  TreeParseError(std::size_t pos, const std::string& what)
      : Error("tree parse error at offset " + std::to_string(pos) + ": " + what),
        position(pos) {}
  std::size_t position;
};

class SchemaHashMissing : public Error {
public:
  SchemaHashMissing() : Error("tree file lacks the schema hash header") {}
};

// ---------------------------------------------------------------------------
// Reporting and simulation
// ---------------------------------------------------------------------------

class EmptyRecords : public Error {
public:
  EmptyRecords() : Error("no boundary error records") {}
};

class LengthMismatch : public Error {
public:
  LengthMismatch(std::size_t a, std::size_t b)
      : Error("records and labels differ in length: " + std::to_string(a) + " vs " +
              std::to_string(b)) {}
};

class ZeroBaseline : public Error {
public:
  ZeroBaseline() : Error("baseline total error is zero") {}
};

class InvalidConfig : public Error {
public:
  explicit InvalidConfig(const std::string& what) : Error(what) {}
};

class EmptyTrainingSet : public Error {
public:
  EmptyTrainingSet() : Error("training split contains no examples") {}
};

}  // namespace segcor
