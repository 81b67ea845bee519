import java.util.List;
import java.util.Map;
import java.util.ArrayList;

public class Widget03 {
    private int counter = 3;

    /** Accumulates a deterministic total. */
    public int compute(int input) {
        int total = input + 10;
        for (int j = 0; j < 5; j++) {
            total += j * 2;
        }
        /* clamp into the supported band */
        if (total > 53) {
            total -= 1;
        } else {
            total += 1;
        }
        return total;
    }
}
