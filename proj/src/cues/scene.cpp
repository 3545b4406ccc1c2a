#include "scanseg/cues/scene.hpp"

#include <set>
#include <stdexcept>

namespace scanseg {

void CueBundle::validate() const {
    const auto& ref = semantic;
    auto check = [&](int w, int h, const char* what) {
        if (w != ref.width || h != ref.height)
            throw std::invalid_argument(std::string("CueBundle: ") + what + " size differs from semantic cue");
    };
    check(appearance.width, appearance.height, "appearance");
    check(motion.width, motion.height, "motion");
    check(saliency.width(), saliency.height(), "saliency");
    check(flow.dx.width, flow.dx.height, "flow.dx");
    check(flow.dy.width, flow.dy.height, "flow.dy");
    if (!saliency.within_range(1e-9)) throw std::invalid_argument("CueBundle: saliency outside [0,1]");
    if (!flow.all_finite()) throw std::invalid_argument("CueBundle: non-finite flow");
}

GroundTruth GroundTruth::from_labels(std::vector<LabelMap> labels) {
    GroundTruth gt;
    gt.labels = std::move(labels);
    for (int f = 0; f < static_cast<int>(gt.labels.size()); ++f)
        for (Label l : gt.labels[f].data)
            if (l != 0 && !gt.first_frame.count(l)) gt.first_frame[l] = f;
    return gt;
}

std::vector<Label> GroundTruth::objects_in_frame(int frame) const {
    std::set<Label> s;
    if (frame < 0 || frame >= static_cast<int>(labels.size())) return {};
    for (Label l : labels[frame].data)
        if (l != 0) s.insert(l);
    return {s.begin(), s.end()};
}

std::vector<Label> GroundTruth::all_objects() const {
    std::vector<Label> out;
    for (const auto& [id, f] : first_frame) out.push_back(id);
    return out;
}

void Scene::validate() const {
    spec.validate();
    if (static_cast<int>(cues.size()) != spec.n_frames)
        throw std::invalid_argument("Scene '" + name + "': cue frame count differs from n_frames");
    if (static_cast<int>(gt.labels.size()) != spec.n_frames)
        throw std::invalid_argument("Scene '" + name + "': ground-truth frame count differs from n_frames");
    for (const auto& c : cues) {
        c.validate();
        if (c.width() != spec.width_px || c.height() != spec.height_px)
            throw std::invalid_argument("Scene '" + name + "': cue size differs from video size");
    }
    for (const auto& g : gt.labels)
        if (g.width != spec.width_px || g.height != spec.height_px)
            throw std::invalid_argument("Scene '" + name + "': ground-truth size differs from video size");
    if (!rgb.empty() && static_cast<int>(rgb.size()) != spec.n_frames)
        throw std::invalid_argument("Scene '" + name + "': rgb frame count differs from n_frames");
}

}  // namespace scanseg
