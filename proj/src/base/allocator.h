// base/allocator.h

// Copyright 2026 The octsep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef OCTSEP_BASE_ALLOCATOR_H_
#define OCTSEP_BASE_ALLOCATOR_H_

namespace octsep {

// Keeps large freed blocks in the heap instead of returning them to the
// kernel. Feature maps are reallocated every forward pass; without this each
// allocation pays for fresh zeroed pages. Idempotent; a no-op off glibc.
void RetainHeapMemory();

}  // namespace octsep

#endif  // OCTSEP_BASE_ALLOCATOR_H_
