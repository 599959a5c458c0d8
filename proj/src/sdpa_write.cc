#include <algorithm>
#include <sstream>

#include "sdpgame/compiler.h"

namespace sdpgame {

namespace {
void emit_matrix(std::ostringstream& os, int row, int block, const SymMatrix& m,
                 bool negate, int digits) {
  for (int i = 0; i < m.dim(); ++i) {
    for (int j = i; j < m.dim(); ++j) {
      const Real& x = m(i, j);
      if (x == 0) continue;
      os << row << ' ' << block + 1 << ' ' << i + 1 << ' ' << j + 1 << ' '
         << format_real(negate ? Real(-x) : x, digits) << '\n';
    }
  }
}
}  // namespace

std::string emit_sdpa(const SdpInstance& inst, int digits) {
  inst.validate();
  std::ostringstream os;
  os << inst.num_rows() << '\n' << inst.num_blocks() << '\n';
  for (int b = 0; b < inst.num_blocks(); ++b) {
    os << (b ? " " : "") << inst.blocks[b].dim;
  }
  os << '\n';
  for (int k = 0; k < inst.num_rows(); ++k) {
    os << (k ? " " : "") << format_real(inst.row(k).rhs, digits);
  }
  os << '\n';
  for (int b = 0; b < inst.num_blocks(); ++b) {
    if (inst.objective[b].dim() > 0) emit_matrix(os, 0, b, inst.objective[b], true, digits);
  }
  for (int k = 0; k < inst.num_rows(); ++k) {
    std::vector<const BlockTerm*> terms;
    for (const auto& t : inst.row(k).terms) terms.push_back(&t);
    std::stable_sort(terms.begin(), terms.end(),
                     [](const BlockTerm* a, const BlockTerm* b) { return a->block < b->block; });
    // Terms sharing a block are summed before printing.
    for (size_t i = 0; i < terms.size();) {
      SymMatrix acc = terms[i]->dense();
      size_t j = i + 1;
      for (; j < terms.size() && terms[j]->block == terms[i]->block; ++j) {
        SymMatrix m = terms[j]->dense();
        for (int a = 0; a < m.dim(); ++a) {
          for (int c = a; c < m.dim(); ++c) acc.set(a, c, acc(a, c) + m(a, c));
        }
      }
      emit_matrix(os, k + 1, terms[i]->block, acc, false, digits);
      i = j;
    }
  }
  return os.str();
}

}  // namespace sdpgame
