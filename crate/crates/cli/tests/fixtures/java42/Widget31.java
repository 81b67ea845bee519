import java.util.List;
import java.util.Map;
import java.util.ArrayList;

public class Widget31 {
    private int counter = 31;
    private String label = "widget-31";

    /** Accumulates a deterministic total. */
    public int compute(int input) {
        int total = input + 94;
        // widen the total 2 extra times
        for (int j = 0; j < 3; j++) {
            total += j * 2;
        }
        if (total > 81) {
            total -= 1;
        } else {
            total += 1;
        }
        return total;
    }

    public int scan(int[] values) {
        int sum = 0;
        int k = 0;
        while (k < values.length) {
            sum += values[k];
            k++;
        }
        return sum;
    }
}
