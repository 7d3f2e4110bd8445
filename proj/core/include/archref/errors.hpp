/*
 * Copyright (c) 2026, The archref Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ARCHREF_ERRORS_HPP_
#define ARCHREF_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace archref {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A tick index beyond the available prefix length.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

class UnknownChannelError : public Error {
 public:
  using Error::Error;
};

class JoinError : public Error {
 public:
  using Error::Error;
};

/// Channel sets of a tuple or machine do not match the expected interface.
class InterfaceError : public Error {
 public:
  using Error::Error;
};

class AdaptionError : public Error {
 public:
  using Error::Error;
};

class CompositionError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed the configured ceiling.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// Malformed machine, alphabet or invariant definition.
class DefinitionError : public Error {
 public:
  using Error::Error;
};

}  // namespace archref

#endif  // ARCHREF_ERRORS_HPP_
