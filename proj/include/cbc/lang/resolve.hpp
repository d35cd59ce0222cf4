#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbc/lang/ast.hpp"

namespace cbc {

/// Links the class hierarchy, checks overrides, slots locals and types every
/// expression in place. Throws ResolveError.
void resolve_program(Program& program);

/// Most-derived definition of `method` at or above `cls`: what a receiver of
/// exactly class `cls` dispatches to. Throws UnknownClassError or
/// NoSuchMethodError.
const MethodDef& lookup_dispatch(const Program& program, const std::string& cls,
                                 const std::string& method);

/// Non-throwing variant; nullptr when the method is not visible on `cls`.
const MethodDef* find_dispatch(const Program& program, const std::string& cls,
                               const std::string& method);

/// Reflexive: a class is a subclass of itself.
bool is_subclass_of(const Program& program, const std::string& sub, const std::string& super);

/// `cls` and its ancestors, nearest first.
std::vector<std::string> ancestry(const Program& program, const std::string& cls);

/// `cls` and all its descendants, in name order.
std::vector<std::string> subtree(const Program& program, const std::string& cls);

/// Methods a receiver of class `cls` can dispatch to, in vtable order: root
/// class declarations first, overrides replacing their slot in place.
/// Constructors are not included.
std::vector<const MethodDef*> visible_methods(const Program& program, const std::string& cls);

/// Not declared abstract and no abstract method left unimplemented.
bool is_instantiable(const Program& program, const std::string& cls);

struct FieldSlot {
  std::string owner;
  const FieldDef* def = nullptr;
  int index = -1;  // position in the object layout
};

/// Object layout: inherited fields first (root class first).
std::vector<FieldSlot> field_layout(const Program& program, const std::string& cls);
std::optional<FieldSlot> find_field(const Program& program, const std::string& cls,
                                    const std::string& field);

/// Whether a value of type `from` may be stored where `to` is expected.
bool assignable(const Program& program, const Type& to, const Type& from);

}  // namespace cbc
