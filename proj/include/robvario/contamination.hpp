#ifndef ROBVARIO_CONTAMINATION_HPP
#define ROBVARIO_CONTAMINATION_HPP

#include "robvario/grid.hpp"
#include "robvario/rng.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace robvario {

enum class ContaminationKind { Block, Isolated };
enum class ContaminationMode { Substitutive, Additive };

struct ContaminationSpec {
    ContaminationKind kind = ContaminationKind::Block;
    double epsilon = 0.0;
    double mu0 = 0.0;
    double sigma0 = 1.0;
    ContaminationMode mode = ContaminationMode::Substitutive;
    /// Blocks that are not square are laid out wide or tall with equal probability.
    bool random_orientation = true;
};

/// Wide: w columns by r rows. Tall: the transpose, r columns by w rows.
enum class BlockOrientation { Wide, Tall };

struct Contaminated {
    Grid grid;
    std::vector<Cell> cells;
};

/// ceil(epsilon * n) without rounding surprises for exact products.
std::size_t contaminated_count(double epsilon, std::size_t n);

/// Cells of an m-cell block centred on `center`.
///
/// w = ceil(sqrt(m)) columns and r = ceil(m / w) rows are filled row by row
/// (south to north, west to east) and the trailing cells of the last row are
/// dropped. The centre sits at column ceil(w/2), row ceil(r/2) of the block,
/// and the block is shifted the least distance needed to lie in the grid.
/// When w or r exceeds the grid the block is reshaped to fit.
std::vector<Cell> block_cells(int nx, int ny, std::size_t m, Cell center,
                              BlockOrientation orientation = BlockOrientation::Wide);

/// Replace (or increment) `cells` by independent N(mu0, sigma0^2) draws.
Contaminated apply_outliers(const Grid& g, std::vector<Cell> cells, const ContaminationSpec& spec, RngStream& rng);

/// One block around a centre drawn uniformly over all cells; the orientation
/// is drawn next when spec.random_orientation is set.
Contaminated contaminate_block(const Grid& g, const ContaminationSpec& spec, RngStream& rng);

/// Block around a fixed centre.
Contaminated contaminate_block_at(const Grid& g, const ContaminationSpec& spec, Cell center, RngStream& rng,
                                  BlockOrientation orientation = BlockOrientation::Wide);

/// ceil(epsilon * n) distinct cells drawn uniformly without replacement.
Contaminated contaminate_isolated(const Grid& g, const ContaminationSpec& spec, RngStream& rng);

/// Dispatch on spec.kind.
Contaminated contaminate(const Grid& g, const ContaminationSpec& spec, RngStream& rng);

/// Parses "kind=block,eps=0.05,mu0=3,sigma0=1,mode=substitutive,orient=random"; omitted keys keep defaults.
ContaminationSpec parse_contamination(std::string_view text);
std::string to_string(const ContaminationSpec& spec);

} // namespace robvario

#endif // ROBVARIO_CONTAMINATION_HPP
