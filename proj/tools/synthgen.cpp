// synthgen: writes a deterministic synthetic image-classification corpus in
// IDX format, for exercising fedsim without external datasets.

#include "ringfed/dataset.hpp"
#include "ringfed/errors.hpp"
#include "ringfed/synth.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"synthgen: deterministic synthetic IDX corpus"};

    std::string out_dir = "data";
    bool gzip = false;
    ringfed::SynthSpec spec;

    app.add_option("--out-dir", out_dir, "output directory");
    app.add_flag("--gzip", gzip, "write .gz-compressed IDX files");
    app.add_option("--train-count", spec.train_count, "training examples (multiple of classes)");
    app.add_option("--test-count", spec.test_count, "test examples (multiple of classes)");
    app.add_option("--classes", spec.classes, "number of classes");
    app.add_option("--rows", spec.rows, "image rows");
    app.add_option("--cols", spec.cols, "image cols");
    app.add_option("--contrast", spec.contrast, "class prototype strength");
    app.add_option("--wobble", spec.wobble, "per-example smooth deformation");
    app.add_option("--noise", spec.noise, "pixel noise sigma");
    app.add_option("--seed", spec.seed, "generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        std::filesystem::create_directories(out_dir);
        const std::string suffix = gzip ? ".gz" : "";
        const ringfed::SynthCorpus corpus = ringfed::make_synth(spec);
        ringfed::write_idx(corpus.train, out_dir + "/train-images-idx3-ubyte" + suffix,
                           out_dir + "/train-labels-idx1-ubyte" + suffix, spec.rows, spec.cols);
        ringfed::write_idx(corpus.test, out_dir + "/t10k-images-idx3-ubyte" + suffix,
                           out_dir + "/t10k-labels-idx1-ubyte" + suffix, spec.rows, spec.cols);
        std::cout << "wrote " << spec.train_count << " train / " << spec.test_count
                  << " test examples (" << spec.classes << " classes, " << spec.rows << "x"
                  << spec.cols << ") to " << out_dir << "\n";
        return 0;
    } catch (const ringfed::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
