#pragma once

// Data files compiled into the library (generated from data/ at configure time).
namespace borderlab::embedded {

const char* skewcw4sq42_json();
const char* reproduce_json();

}  // namespace borderlab::embedded
